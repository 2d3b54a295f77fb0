//! Schur–Weyl isotypic projectors and Haar-twirled product states.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};
use num_traits::ToPrimitive;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{
    dim_sn_irrep, dim_ud_irrep, enumerate_partitions, schur_poly, sn_character, Partition,
};
use crate::error::{Error, Result};

/// Default cap on the tensor-space dimension `d^n` for operator-level work.
pub const DEFAULT_SIZE_CAP: usize = 1024;

type C64 = Complex<f64>;
use super::HermitianOp;

/// All isotypic projectors for the joint unitary/permutation action on
/// `(C^d)^{⊗n}`, paired with their diagram labels.
///
/// Each projector is `(dim V_λ / n!) Σ_σ χ_λ(σ) V_σ`.  One sweep over the
/// permutation group accumulates every label at once; the group is walked
/// with Heap's algorithm so successive permutations differ by a single
/// transposition and the index maps update in place.  Accumulation is in
/// exact integers, so the result does not depend on the parallel split.
pub fn schur_weyl_projectors(d: usize, n: usize, cap: usize) -> Result<Vec<(Partition, HermitianOp)>> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument("need d ≥ 1 and n ≥ 1".into()));
    }
    let dim = checked_dim(d, n, cap)?;
    let lambdas = enumerate_partitions(n as u64, d)?;
    let classes = enumerate_partitions(n as u64, n)?;
    let class_index: HashMap<Vec<u32>, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.parts().to_vec(), i))
        .collect();

    // χ_λ(class), flattened as [class][lambda].
    let n_lam = lambdas.len();
    let mut chi = vec![0i64; classes.len() * n_lam];
    for (ci, class) in classes.iter().enumerate() {
        let cycles = &class.parts()[..class.rows()];
        for (li, lam) in lambdas.iter().enumerate() {
            chi[ci * n_lam + li] = sn_character(lam, cycles)?;
        }
    }

    // Walk S_n once, recording the transposition sequence and the class of
    // every permutation (identity first).
    let (swaps, class_of_step) = heap_walk(n, &class_index);

    let pows: Vec<u64> = (0..n).map(|p| (d as u64).pow((n - 1 - p) as u32)).collect();

    // acc[(j·dim + i)·n_lam + l] accumulates Σ_σ χ_λ(σ)·[i = σ·j].
    let mut acc = vec![0i64; dim * dim * n_lam];
    let fill_column = |j: usize, column: &mut [i64]| {
        let mut x = j as u64;
        add_into(column, x as usize, n_lam, &chi, class_of_step[0] as usize);
        for (step, &(s, t)) in swaps.iter().enumerate() {
            x = swap_digits(x, pows[s], pows[t], d as u64);
            add_into(column, x as usize, n_lam, &chi, class_of_step[step + 1] as usize);
        }
    };

    #[cfg(feature = "parallel")]
    acc.par_chunks_mut(dim * n_lam)
        .enumerate()
        .for_each(|(j, column)| fill_column(j, column));
    #[cfg(not(feature = "parallel"))]
    acc.chunks_mut(dim * n_lam)
        .enumerate()
        .for_each(|(j, column)| fill_column(j, column));

    let n_fact: f64 = (1..=n as u64).map(|i| i as f64).product();
    let mut out = Vec::with_capacity(n_lam);
    for (li, lam) in lambdas.iter().enumerate() {
        let dim_v = dim_sn_irrep(lam)?
            .to_f64()
            .ok_or_else(|| Error::Internal("dim V out of f64 range".into()))?;
        let scale = dim_v / n_fact;
        let mat = DMatrix::from_fn(dim, dim, |i, j| {
            C64::new(scale * acc[(j * dim + i) * n_lam + li] as f64, 0.0)
        });
        out.push((lam.clone(), HermitianOp::from_matrix(mat)?));
    }
    Ok(out)
}

/// Single isotypic projector; validates `p ∈ Y_n^d`.
///
/// Assembles the full batch internally, so prefer
/// [`schur_weyl_projectors`] when several labels are needed.
pub fn schur_weyl_projector(p: &Partition, d: usize, n: usize) -> Result<HermitianOp> {
    if p.n() != n as u64 || p.rows() > d {
        return Err(Error::InvalidArgument(format!(
            "{:?} is not a diagram of {} boxes with at most {} rows",
            p, n, d
        )));
    }
    let all = schur_weyl_projectors(d, n, DEFAULT_SIZE_CAP)?;
    all.into_iter()
        .find(|(lam, _)| lam.parts()[..lam.rows()] == p.parts()[..p.rows()])
        .map(|(_, proj)| proj)
        .ok_or_else(|| Error::Internal("label missing from isotypic batch".into()))
}

/// Haar average of `(U diag(t) U†)^{⊗n}` over the unitary group.
///
/// The average is block-scalar: `Σ_λ (s_λ(t)/dim U_λ)·P_λ`.
pub fn haar_twirled_iid_state(t: &[f64], n: usize) -> Result<HermitianOp> {
    let d = t.len();
    let projs = schur_weyl_projectors(d, n, DEFAULT_SIZE_CAP)?;
    haar_twirled_iid_state_with_projectors(t, n, &projs)
}

/// Same as [`haar_twirled_iid_state`] but reusing a projector batch.
pub fn haar_twirled_iid_state_with_projectors(
    t: &[f64],
    n: usize,
    projs: &[(Partition, HermitianOp)],
) -> Result<HermitianOp> {
    let d = t.len();
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument("need d ≥ 1 and n ≥ 1".into()));
    }
    let total: f64 = t.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "spectrum must sum to 1, got {total}"
        )));
    }
    if t.iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidArgument("spectrum must be nonnegative".into()));
    }
    let mut sorted = t.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let dim = projs
        .first()
        .map(|(_, p)| p.dim())
        .ok_or_else(|| Error::InvalidArgument("empty projector batch".into()))?;
    let mut out = HermitianOp::zeros(dim);
    for (lam, proj) in projs {
        let s = schur_poly(&lam.to_width(d)?, &sorted)?;
        let dim_u = dim_ud_irrep(lam, d)?
            .to_f64()
            .ok_or_else(|| Error::Internal("dim U out of f64 range".into()))?;
        out.add_scaled_in_place(proj, s / dim_u);
    }
    Ok(out)
}

fn checked_dim(d: usize, n: usize, cap: usize) -> Result<usize> {
    let mut dim = 1usize;
    for _ in 0..n {
        dim = dim
            .checked_mul(d)
            .ok_or(Error::SizeCap { dim: usize::MAX, cap })?;
        if dim > cap {
            return Err(Error::SizeCap { dim, cap });
        }
    }
    Ok(dim)
}

#[inline]
fn add_into(column: &mut [i64], row: usize, n_lam: usize, chi: &[i64], class: usize) {
    let dst = &mut column[row * n_lam..row * n_lam + n_lam];
    let src = &chi[class * n_lam..class * n_lam + n_lam];
    for l in 0..n_lam {
        dst[l] += src[l];
    }
}

/// Swap the base-`d` digits selected by the two place values.
#[inline]
fn swap_digits(x: u64, pow_s: u64, pow_t: u64, d: u64) -> u64 {
    let ds = (x / pow_s) % d;
    let dt = (x / pow_t) % d;
    (x as i64 + (dt as i64 - ds as i64) * pow_s as i64 + (ds as i64 - dt as i64) * pow_t as i64)
        as u64
}

/// Enumerate S_n by Heap's algorithm; returns the transposition sequence
/// (position pairs) and the conjugacy-class index of each permutation.
fn heap_walk(n: usize, class_index: &HashMap<Vec<u32>, usize>) -> (Vec<(usize, usize)>, Vec<u32>) {
    let total: usize = (1..=n).product();
    let mut swaps = Vec::with_capacity(total.saturating_sub(1));
    let mut classes = Vec::with_capacity(total);
    let mut a: Vec<usize> = (0..n).collect();
    classes.push(class_index[&cycle_type(&a)] as u32);
    let mut c = vec![0usize; n];
    let mut i = 1usize;
    while i < n {
        if c[i] < i {
            let s = if i % 2 == 0 { 0 } else { c[i] };
            a.swap(s, i);
            swaps.push((s, i));
            classes.push(class_index[&cycle_type(&a)] as u32);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    (swaps, classes)
}

/// Cycle type of a permutation, padded with zeros to length n (matching the
/// partition enumeration used for class labels).
fn cycle_type(a: &[usize]) -> Vec<u32> {
    let n = a.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u32;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = a[cur];
            len += 1;
        }
        cycles.push(len);
    }
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    cycles.resize(n, 0);
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn batch(d: usize, n: usize) -> Vec<(Partition, HermitianOp)> {
        schur_weyl_projectors(d, n, DEFAULT_SIZE_CAP).unwrap()
    }

    #[test]
    fn traces_are_isotypic_ranks() {
        for (d, n) in [(2usize, 3usize), (2, 4), (3, 3), (2, 5)] {
            for (lam, proj) in batch(d, n) {
                let want = (dim_ud_irrep(&lam, d).unwrap() * dim_sn_irrep(&lam).unwrap())
                    .to_f64()
                    .unwrap();
                assert!(
                    (proj.trace() - want).abs() < 1e-9,
                    "trace of {:?} for d={} n={}",
                    lam,
                    d,
                    n
                );
            }
        }
    }

    #[test]
    fn three_qubit_ranks_match_hand_count() {
        let projs = batch(2, 3);
        assert_eq!(projs.len(), 2);
        assert!((projs[0].1.trace() - 4.0).abs() < 1e-10); // (3,0): 4·1
        assert!((projs[1].1.trace() - 4.0).abs() < 1e-10); // (2,1): 2·2
    }

    #[test]
    fn completeness_idempotence_orthogonality() {
        for (d, n) in [(2usize, 4usize), (3, 3)] {
            let projs = batch(d, n);
            let dim = projs[0].1.dim();
            let mut total = HermitianOp::zeros(dim);
            for (_, p) in &projs {
                total.add_scaled_in_place(p, 1.0);
                let sq = HermitianOp::from_matrix(p.matrix() * p.matrix()).unwrap();
                assert!(p.frobenius_distance(&sq) < 1e-10);
            }
            assert!(total.frobenius_distance(&HermitianOp::identity(dim)) < 1e-10);
            for a in 0..projs.len() {
                for b in 0..a {
                    let prod = (projs[a].1.matrix() * projs[b].1.matrix()).norm();
                    assert!(prod < 1e-10);
                }
            }
        }
    }

    #[test]
    fn twirled_state_props() {
        // t = (1,0): supported on the single-row block with unit trace.
        let projs = batch(2, 3);
        let s = haar_twirled_iid_state_with_projectors(&[1.0, 0.0], 3, &projs).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-10);
        let overlap = projs[0].1.expectation(&s);
        assert!((overlap - 1.0).abs() < 1e-10);

        // Arbitrary spectrum: unit trace, PSD, commutes with every projector.
        let s = haar_twirled_iid_state_with_projectors(&[0.6, 0.4], 3, &projs).unwrap();
        assert!((s.trace() - 1.0).abs() < 1e-10);
        assert!(s.is_psd(1e-12));
        for (_, p) in &projs {
            assert!(s.commutator_norm(p) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_spectra_and_caps() {
        assert!(haar_twirled_iid_state(&[0.7, 0.4], 2).is_err());
        assert!(schur_weyl_projectors(2, 11, DEFAULT_SIZE_CAP).is_err());
        let p = Partition::new(vec![2, 1]).unwrap();
        assert!(schur_weyl_projector(&p, 2, 4).is_err());
    }
}
