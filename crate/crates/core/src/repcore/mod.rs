//! Exact combinatorics and small-scale representation theory.
//!
//! Partitions and compositions index the irreducible blocks of the joint
//! unitary/symmetric-group action on `(C^d)^{⊗n}`.  Everything integral is
//! exact (arbitrary precision where factorials overflow); Schur values and
//! operators are `f64`.

mod character;
mod operator;
mod partition;
mod projector;
mod schur;

pub use character::{sn_character, CharacterTable};
pub use operator::HermitianOp;
pub use partition::{
    enumerate_partitions, hook_lengths, Composition, Partition,
};
pub use projector::{
    haar_twirled_iid_state, haar_twirled_iid_state_with_projectors, schur_weyl_projector,
    schur_weyl_projectors, DEFAULT_SIZE_CAP,
};
pub use schur::schur_poly;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Natural log of an arbitrary-size nonnegative integer.
///
/// Exact integers can exceed the f64 range long before their logarithm
/// does, so fall back to a bit-shift representation for huge values.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.bits() == 0 {
        return f64::NEG_INFINITY;
    }
    if x.bits() <= 900 {
        x.to_f64().expect("fits f64 range").ln()
    } else {
        let shift = x.bits() - 64;
        let top = (x >> shift).to_f64().expect("64-bit mantissa");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

use crate::error::{Error, Result};

/// `n! / ∏ hooks` as the exact symmetric-group irrep dimension.
pub fn dim_sn_irrep(p: &Partition) -> Result<BigUint> {
    let n = p.n();
    let mut num = BigUint::from(1u32);
    for i in 2..=n {
        num *= BigUint::from(i);
    }
    let mut den = BigUint::from(1u32);
    for (_, h) in hook_lengths(p) {
        den *= BigUint::from(h);
    }
    if (&num % &den) != BigUint::from(0u32) {
        return Err(Error::Internal(format!(
            "hook product does not divide {}! for {:?}",
            n, p
        )));
    }
    Ok(num / den)
}

/// `∏ (d − i + j) / ∏ hooks` as the exact unitary-group irrep dimension.
pub fn dim_ud_irrep(p: &Partition, d: usize) -> Result<BigUint> {
    if p.rows() > d {
        return Err(Error::InvalidArgument(format!(
            "partition has {} nonzero rows, exceeding d = {}",
            p.rows(),
            d
        )));
    }
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for ((i, j), h) in hook_lengths(p) {
        // 1-based cell (i, j) contributes factor d − i + j.
        num *= BigUint::from((d + j - i) as u64);
        den *= BigUint::from(h);
    }
    if (&num % &den) != BigUint::from(0u32) {
        return Err(Error::Internal(format!(
            "content product not divisible by hooks for {:?}, d = {}",
            p, d
        )));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sn_dims_match_hand_counts() {
        let p21 = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(dim_sn_irrep(&p21).unwrap(), BigUint::from(2u32));
        // Single row and single column are one-dimensional.
        for n in 1..=9u32 {
            let row = Partition::new(vec![n]).unwrap();
            assert_eq!(dim_sn_irrep(&row).unwrap(), BigUint::from(1u32));
            let col = Partition::new(vec![1; n as usize]).unwrap();
            assert_eq!(dim_sn_irrep(&col).unwrap(), BigUint::from(1u32));
        }
    }

    #[test]
    fn ud_dims_match_hand_counts() {
        let p21 = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(dim_ud_irrep(&p21, 2).unwrap(), BigUint::from(2u32));
        let p11 = Partition::new(vec![1, 1]).unwrap();
        assert_eq!(dim_ud_irrep(&p11, 2).unwrap(), BigUint::from(1u32));
        // Single row of n boxes: binom(n + d − 1, n).
        for d in 1..=4usize {
            for n in 0..=8u32 {
                let row = Partition::new(vec![n]).unwrap();
                let got = dim_ud_irrep(&row, d).unwrap();
                let want = binom(n as u64 + d as u64 - 1, n as u64);
                assert_eq!(got, want, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn dimension_completeness_small() {
        // Σ_{λ ∈ Y_n^d} dim U · dim V = d^n, exactly.
        for d in 1..=3usize {
            for n in 0..=8u32 {
                let mut total = BigUint::from(0u32);
                for p in enumerate_partitions(n as u64, d).unwrap() {
                    total += dim_ud_irrep(&p, d).unwrap() * dim_sn_irrep(&p).unwrap();
                }
                assert_eq!(total, BigUint::from(d).pow(n), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn ln_biguint_handles_huge_values() {
        let mut x = BigUint::from(1u32);
        for i in 1..=500u32 {
            x *= BigUint::from(i);
        }
        // ln(500!) by Stirling: 500 ln 500 − 500 + 0.5 ln(2π·500) + ...
        let stirling = 500.0f64 * 500.0f64.ln() - 500.0 + 0.5 * (2.0 * std::f64::consts::PI * 500.0).ln()
            + 1.0 / (12.0 * 500.0);
        assert!((ln_biguint(&x) - stirling).abs() < 1e-6);
    }

    fn binom(n: u64, k: u64) -> BigUint {
        let mut out = BigUint::from(1u32);
        for i in 0..k {
            out = out * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        out
    }
}
