//! Schur polynomial evaluation.

use std::collections::HashMap;

use super::Partition;
use crate::error::{Error, Result};

/// Evaluate the Schur polynomial `s_p(t)` at a nonnegative point.
///
/// The bialternant quotient of determinants is 0/0 at repeated `t_i`, so
/// this evaluates the division-free branching recursion instead: peel the
/// last variable off as a horizontal strip,
/// `s_λ(t_1..t_m) = Σ_{μ ≺ λ} t_m^{|λ|−|μ|} s_μ(t_1..t_{m−1})`,
/// which agrees with the semistandard-tableau expansion and is exact for
/// ties and zeros (with the convention `0^0 = 1`).
pub fn schur_poly(p: &Partition, t: &[f64]) -> Result<f64> {
    if t.len() != p.width() {
        return Err(Error::InvalidArgument(format!(
            "variable count {} does not match diagram width {}",
            t.len(),
            p.width()
        )));
    }
    if t.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidArgument(
            "Schur evaluation point must be nonnegative and finite".into(),
        ));
    }
    let shape: Vec<u32> = trim(p.parts());
    if shape.len() > t.len() {
        // More nonzero rows than variables: the polynomial is identically 0.
        return Ok(0.0);
    }
    let mut memo: HashMap<(usize, Vec<u32>), f64> = HashMap::new();
    Ok(branch(&shape, t.len(), t, &mut memo))
}

fn trim(parts: &[u32]) -> Vec<u32> {
    let rows = parts.iter().take_while(|&&p| p > 0).count();
    parts[..rows].to_vec()
}

fn branch(shape: &[u32], m: usize, t: &[f64], memo: &mut HashMap<(usize, Vec<u32>), f64>) -> f64 {
    if shape.is_empty() {
        return 1.0;
    }
    if m == 0 {
        return 0.0;
    }
    if shape.len() > m {
        return 0.0;
    }
    let key = (m, shape.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let total: u32 = shape.iter().sum();
    let x = t[m - 1];
    let mut acc = 0.0;
    // Enumerate all μ with λ_{i+1} ≤ μ_i ≤ λ_i (horizontal strips λ/μ).
    let mut mu: Vec<u32> = Vec::with_capacity(shape.len());
    enumerate_strips(shape, 0, &mut mu, &mut |mu| {
        let sub: u32 = mu.iter().sum();
        let expo = (total - sub) as i32;
        let weight = if expo == 0 { 1.0 } else { x.powi(expo) };
        if weight != 0.0 {
            acc += weight * branch(&trim(mu), m - 1, t, memo);
        }
    });
    memo.insert(key, acc);
    acc
}

fn enumerate_strips(shape: &[u32], row: usize, mu: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
    if row == shape.len() {
        visit(mu);
        return;
    }
    let hi = shape[row];
    let lo = shape.get(row + 1).copied().unwrap_or(0);
    for v in lo..=hi {
        mu.push(v);
        enumerate_strips(shape, row + 1, mu, visit);
        mu.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repcore::{dim_ud_irrep, enumerate_partitions};
    use num_traits::ToPrimitive;

    /// Brute-force oracle: sum monomials over all semistandard tableaux of
    /// the given shape with entries in 1..=d.
    fn ssyt_sum(shape: &[u32], t: &[f64]) -> f64 {
        let rows: Vec<usize> = shape
            .iter()
            .take_while(|&&r| r > 0)
            .map(|&r| r as usize)
            .collect();
        if rows.is_empty() {
            return 1.0;
        }
        let d = t.len();
        let mut filling: Vec<Vec<usize>> = rows.iter().map(|&r| vec![0; r]).collect();
        let mut total = 0.0;
        fill_cell(&rows, d, 0, 0, &mut filling, t, &mut total);
        return total;

        fn fill_cell(
            rows: &[usize],
            d: usize,
            i: usize,
            j: usize,
            filling: &mut Vec<Vec<usize>>,
            t: &[f64],
            total: &mut f64,
        ) {
            if i == rows.len() {
                let mut w = 1.0;
                for row in filling.iter() {
                    for &e in row {
                        w *= t[e - 1];
                    }
                }
                *total += w;
                return;
            }
            let (ni, nj) = if j + 1 < rows[i] { (i, j + 1) } else { (i + 1, 0) };
            let min_row = if j > 0 { filling[i][j - 1] } else { 1 };
            let min_col = if i > 0 && j < rows[i - 1] {
                filling[i - 1][j] + 1
            } else {
                1
            };
            for e in min_row.max(min_col)..=d {
                filling[i][j] = e;
                fill_cell(rows, d, ni, nj, filling, t, total);
            }
            filling[i][j] = 0;
        }
    }

    #[test]
    fn hand_checked_values() {
        let p21 = Partition::new(vec![2, 1]).unwrap();
        // Two tableaux: 11/2 and 12/2 → t1²t2 + t1t2² = t1·t2·(t1+t2).
        let v = schur_poly(&p21, &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((v - 2.0 / 9.0).abs() < 1e-15);

        // Single row at (1, 0, ...): one all-ones tableau.
        for n in 1..=6u32 {
            let row = Partition::new(vec![n, 0, 0]).unwrap();
            let v = schur_poly(&row, &[1.0, 0.0, 0.0]).unwrap();
            assert_eq!(v, 1.0);
        }

        // s_λ(1,…,1) = dim U_λ.
        let v = schur_poly(&p21, &[1.0, 1.0]).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn matches_tableau_oracle_on_grid() {
        let grid = [
            vec![1.0, 0.0, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.3, 0.2],
            vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            vec![0.7, 0.2, 0.1],
            vec![0.9, 0.05, 0.05],
            vec![0.4, 0.4, 0.2],
            vec![0.6, 0.4, 0.0],
            vec![0.25, 0.25, 0.5],
            vec![0.8, 0.1, 0.1],
        ];
        for n in 0..=6u64 {
            for p in enumerate_partitions(n, 3).unwrap() {
                for t in &grid {
                    let fast = schur_poly(&p, t).unwrap();
                    let slow = ssyt_sum(p.parts(), t);
                    assert!(
                        (fast - slow).abs() <= 1e-12 * (1.0 + slow.abs()),
                        "{:?} at {:?}: {} vs {}",
                        p,
                        t,
                        fast,
                        slow
                    );
                }
            }
        }
    }

    #[test]
    fn dominates_leading_monomial() {
        // s_p(t) ≥ ∏ t_i^{p_i}: the i-th-row-filled-with-i tableau is one term.
        let grid = [
            vec![0.5, 0.3, 0.2],
            vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            vec![0.7, 0.2, 0.1],
            vec![0.6, 0.4, 0.0],
        ];
        for n in 1..=6u64 {
            for p in enumerate_partitions(n, 3).unwrap() {
                for t in &grid {
                    let s = schur_poly(&p, t).unwrap();
                    let mono: f64 = p
                        .parts()
                        .iter()
                        .zip(t)
                        .map(|(&e, &x)| if e == 0 { 1.0 } else { x.powi(e as i32) })
                        .product();
                    assert!(s >= mono - 1e-15, "{:?} {:?}", p, t);
                }
            }
        }
    }

    #[test]
    fn sum_against_unitary_dimension() {
        // Σ_λ s_λ(t)·dimV = 1 at normalized t is covered in coeffs;
        // here check s_λ(1,..,1) = dim U exactly for a sweep.
        for d in 1..=3usize {
            for n in 0..=6u64 {
                for p in enumerate_partitions(n, d).unwrap() {
                    let v = schur_poly(&p, &vec![1.0; d]).unwrap();
                    let dim = dim_ud_irrep(&p, d).unwrap().to_f64().unwrap();
                    assert!((v - dim).abs() < 1e-9, "{:?} d={}", p, d);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let p = Partition::new(vec![2, 1]).unwrap();
        assert!(schur_poly(&p, &[0.5]).is_err());
        assert!(schur_poly(&p, &[0.5, -0.1]).is_err());
    }
}
