//! Symmetric-group characters via the Murnaghan–Nakayama rule.

use std::collections::HashMap;

use num_bigint::BigUint;

use super::{enumerate_partitions, Partition};
use crate::error::{Error, Result};

/// Irreducible character `χ_λ(μ)` of the symmetric group, where `μ` is a
/// cycle type given as a list of cycle lengths (order irrelevant).
///
/// Border strips are manipulated through beta-numbers: removing a strip of
/// length `ℓ` subtracts `ℓ` from one beta-number, and the sign counts the
/// beta-numbers jumped over.
pub fn sn_character(lambda: &Partition, mu: &[u32]) -> Result<i64> {
    let n: u64 = mu.iter().map(|&c| c as u64).sum();
    if lambda.n() != n {
        return Err(Error::InvalidArgument(format!(
            "character of {:?} at cycle type {:?}: sizes differ",
            lambda, mu
        )));
    }
    if mu.iter().any(|&c| c == 0) {
        return Err(Error::InvalidArgument("cycle lengths must be positive".into()));
    }
    let mut cycles: Vec<u32> = mu.to_vec();
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    let shape: Vec<u32> = lambda
        .parts()
        .iter()
        .copied()
        .take_while(|&p| p > 0)
        .collect();
    let mut memo = HashMap::new();
    Ok(mn_recurse(&shape, &cycles, 0, &mut memo))
}

fn mn_recurse(
    shape: &[u32],
    cycles: &[u32],
    depth: usize,
    memo: &mut HashMap<(Vec<u32>, usize), i64>,
) -> i64 {
    if shape.is_empty() {
        return 1;
    }
    let key = (shape.to_vec(), depth);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let ell = cycles[depth] as i64;
    let len = shape.len();
    // Beta numbers: strictly decreasing.
    let betas: Vec<i64> = shape
        .iter()
        .enumerate()
        .map(|(i, &p)| p as i64 + (len - 1 - i) as i64)
        .collect();
    let mut total = 0i64;
    for (i, &b) in betas.iter().enumerate() {
        let target = b - ell;
        if target < 0 || betas.contains(&target) {
            continue;
        }
        let jumped = betas.iter().filter(|&&x| target < x && x < b).count();
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        let mut new_betas = betas.clone();
        new_betas[i] = target;
        new_betas.sort_unstable_by(|a, b| b.cmp(a));
        let new_shape: Vec<u32> = new_betas
            .iter()
            .enumerate()
            .map(|(j, &nb)| (nb - (len - 1 - j) as i64) as u32)
            .take_while(|&p| p > 0)
            .collect();
        total += sign * mn_recurse(&new_shape, cycles, depth + 1, memo);
    }
    memo.insert(key, total);
    total
}

/// Full character table of the symmetric group on `n` letters, with exact
/// class sizes.
pub struct CharacterTable {
    n: u64,
    lambdas: Vec<Partition>,
    classes: Vec<Partition>,
    class_sizes: Vec<BigUint>,
    values: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn new(n: u64) -> Result<Self> {
        let lambdas = enumerate_partitions(n, n.max(1) as usize)?;
        let classes = lambdas.clone();
        let class_sizes = classes.iter().map(|c| class_size(n, c)).collect();
        let values = lambdas
            .iter()
            .map(|lam| {
                classes
                    .iter()
                    .map(|mu| sn_character(lam, nonzero(mu)))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, lambdas, classes, class_sizes, values })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lambdas(&self) -> &[Partition] {
        &self.lambdas
    }

    pub fn classes(&self) -> &[Partition] {
        &self.classes
    }

    pub fn class_size(&self, class_index: usize) -> &BigUint {
        &self.class_sizes[class_index]
    }

    pub fn value(&self, lambda_index: usize, class_index: usize) -> i64 {
        self.values[lambda_index][class_index]
    }

    pub fn value_of(&self, lambda: &Partition, mu: &Partition) -> Option<i64> {
        let li = self.lambdas.iter().position(|l| l.parts() == lambda.parts())?;
        let ci = self.classes.iter().position(|c| c.parts() == mu.parts())?;
        Some(self.values[li][ci])
    }

    /// First orthogonality: `Σ_μ |class(μ)|·χ_λ(μ)·χ_λ'(μ) = n!·δ_{λλ'}`,
    /// in exact integer arithmetic.
    pub fn check_orthogonality(&self) -> bool {
        let nfact: BigUint = (1..=self.n).map(BigUint::from).product();
        for (a, row_a) in self.values.iter().enumerate() {
            for (b, row_b) in self.values.iter().enumerate() {
                let mut acc_pos = BigUint::from(0u32);
                let mut acc_neg = BigUint::from(0u32);
                for (c, size) in self.class_sizes.iter().enumerate() {
                    let prod = row_a[c] as i128 * row_b[c] as i128;
                    if prod >= 0 {
                        acc_pos += size * BigUint::from(prod as u128);
                    } else {
                        acc_neg += size * BigUint::from((-prod) as u128);
                    }
                }
                let expected = if a == b { nfact.clone() } else { BigUint::from(0u32) };
                if acc_pos < acc_neg || acc_pos - acc_neg != expected {
                    return false;
                }
            }
        }
        true
    }
}

fn nonzero(p: &Partition) -> &[u32] {
    let rows = p.rows();
    &p.parts()[..rows]
}

/// Number of permutations with the given cycle type: `n! / ∏ k^{m_k} m_k!`.
fn class_size(n: u64, cycle_type: &Partition) -> BigUint {
    let mut z = BigUint::from(1u32);
    let mut mult: HashMap<u32, u64> = HashMap::new();
    for &c in nonzero(cycle_type) {
        *mult.entry(c).or_insert(0) += 1;
    }
    for (&k, &m) in mult.iter() {
        z *= BigUint::from(k as u64).pow(m as u32);
        for i in 1..=m {
            z *= BigUint::from(i);
        }
    }
    let nfact: BigUint = (1..=n).map(BigUint::from).product();
    nfact / z
}
