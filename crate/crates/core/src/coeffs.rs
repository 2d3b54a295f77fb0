//! Polynomial prefactors and elementary distribution functions, in log scale.
//!
//! These price the reduction from adversarial statistics to i.i.d.
//! statistics: the per-diagram and uniform quantum factors, the per-type
//! and uniform classical factors, and the multinomial mass function they
//! are built from.  Everything is carried in natural-log scale because the
//! bounds multiply `exp(−nD)` terms at `n` up to `10^8`.

use std::sync::OnceLock;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::geometry::ProbVec;
use crate::repcore::{
    dim_sn_irrep, dim_ud_irrep, ln_biguint, schur_poly, Composition, Partition,
};

/// A natural-log-scale nonnegative real; `−∞` encodes zero.
///
/// When the value represents a probability its linear scale lies in
/// `[0, 1]`; prefactors use the same carrier with values above one.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    pub fn from_ln(value: f64) -> Self {
        Self(value)
    }

    pub fn from_linear(x: f64) -> Result<Self> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "log-scale value needs a nonnegative linear input, got {x}"
            )));
        }
        Ok(Self(x.ln()))
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn log10(self) -> f64 {
        self.0 / std::f64::consts::LN_10
    }

    /// Linear-scale value, saturating to `+∞` above `exp(700)`.
    pub fn linear(self) -> f64 {
        if self.0 > 700.0 {
            f64::INFINITY
        } else {
            self.0.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Product in linear scale.
    pub fn mul(self, other: LogProb) -> LogProb {
        LogProb(self.0 + other.0)
    }

    /// Sum in linear scale (log-sum-exp of the pair).
    pub fn add(self, other: LogProb) -> LogProb {
        LogProb(log_sum_exp_pair(self.0, other.0))
    }
}

fn log_sum_exp_pair(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Monotone log-sum-exp over a slice of natural logs.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + values.iter().map(|&v| (v - hi).exp()).sum::<f64>().ln()
}

const LN_FACT_TABLE_LEN: usize = 4096;

/// `ln n!` from a cached exact-summation table, with a Stirling-series
/// tail for arguments beyond the table.
pub fn ln_factorial(n: u64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE_LEN);
        t.push(0.0);
        for i in 1..LN_FACT_TABLE_LEN as u64 {
            t.push(t[(i - 1) as usize] + (i as f64).ln());
        }
        t
    });
    if (n as usize) < table.len() {
        return table[n as usize];
    }
    let x = n as f64;
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

/// `G(m) = ∏_{i=0}^{m−2} i!` as an exact integer, for `m ≥ 2`.
pub fn barnes_g(m: u64) -> Result<BigUint> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "Barnes G needs an integer argument ≥ 2, got {m}"
        )));
    }
    let mut fact = BigUint::from(1u32);
    let mut out = BigUint::from(1u32);
    for i in 1..=m.saturating_sub(2) {
        fact *= BigUint::from(i);
        out *= &fact;
    }
    Ok(out)
}

/// `log Mult_t(m) = log[n!/(∏ m_i!) ∏ t_i^{m_i}]` with `0·log 0 = 0`;
/// `t_i = 0` against `m_i > 0` gives `−∞`.
pub fn log_multinomial_pmf(t: &ProbVec, m: &Composition) -> Result<LogProb> {
    if t.k() != m.k() {
        return Err(Error::InvalidArgument(format!(
            "distribution has {} entries but type has {}",
            t.k(),
            m.k()
        )));
    }
    let n = m.n();
    let mut ln = ln_factorial(n);
    for (&mi, &ti) in m.counts().iter().zip(t.as_slice()) {
        if mi == 0 {
            continue;
        }
        if ti == 0.0 {
            return Ok(LogProb::ZERO);
        }
        ln -= ln_factorial(mi as u64);
        ln += mi as f64 * ti.ln();
    }
    Ok(LogProb::from_ln(ln))
}

/// Per-type classical factor: the reciprocal multinomial mass of a type at
/// its own empirical distribution.
pub fn f_c_type(n: u64, k: usize, m: &Composition) -> Result<LogProb> {
    if m.k() != k || m.n() != n {
        return Err(Error::InvalidArgument(format!(
            "type {:?} is not a composition of {n} into {k} parts",
            m
        )));
    }
    let mut ln = -ln_factorial(n);
    for &mi in m.counts() {
        if mi == 0 {
            continue;
        }
        ln += ln_factorial(mi as u64);
        // (n/m_i)^{m_i}
        ln += mi as f64 * ((n as f64).ln() - (mi as f64).ln());
    }
    Ok(LogProb::from_ln(ln))
}

/// Uniform classical factor `n^{(k−1)/2} / √(2π (k/e²)^k)`.
pub fn f_c_uniform(n: u64, k: usize) -> Result<LogProb> {
    if n < 1 || k < 1 {
        return Err(Error::InvalidArgument("need n ≥ 1 and k ≥ 1".into()));
    }
    let kf = k as f64;
    let ln = (kf - 1.0) / 2.0 * (n as f64).ln()
        - 0.5 * ((2.0 * std::f64::consts::PI).ln() + kf * (kf.ln() - 2.0));
    Ok(LogProb::from_ln(ln))
}

/// Per-diagram quantum factor `dim U_p / (s_p(p/n)·dim V_p)`.
pub fn f_q_irrep(n: u64, d: usize, p: &Partition) -> Result<LogProb> {
    if p.n() != n || p.rows() > d {
        return Err(Error::InvalidArgument(format!(
            "{:?} is not a diagram of {n} boxes with at most {d} rows",
            p
        )));
    }
    if n == 0 {
        return Ok(LogProb::ONE);
    }
    let padded = p.to_width(d)?;
    let s = schur_poly(&padded, &p.normalized(d)?)?;
    if !(s > 0.0) {
        return Err(Error::Internal(format!(
            "Schur value vanished at its own normalized diagram: {:?}",
            p
        )));
    }
    let ln_u = ln_biguint(&dim_ud_irrep(p, d)?);
    let ln_v = ln_biguint(&dim_sn_irrep(p)?);
    Ok(LogProb::from_ln(ln_u - ln_v - s.ln()))
}

/// Uniform quantum factor
/// `(n+d−1)^{(d²−1)/2} / (√(2π (d/e²)^d)·G(d+1))`.
pub fn f_q_uniform(n: u64, d: usize) -> Result<LogProb> {
    if n < 1 || d < 1 {
        return Err(Error::InvalidArgument("need n ≥ 1 and d ≥ 1".into()));
    }
    let df = d as f64;
    let ln_g = ln_biguint(&barnes_g(d as u64 + 1)?);
    let ln = (df * df - 1.0) / 2.0 * ((n + d as u64 - 1) as f64).ln()
        - 0.5 * ((2.0 * std::f64::consts::PI).ln() + df * (df.ln() - 2.0))
        - ln_g;
    Ok(LogProb::from_ln(ln))
}

/// Prefactor for a permutation-invariant state whose local system splits
/// into `k` symmetry blocks of multiplicity dimensions `d_j`: the typed
/// classical factor times one quantum factor per block, together with the
/// fully uniform variant.  Blocks with zero occupation contribute 1.
pub fn local_symmetry_prefactor(
    n: u64,
    k: usize,
    m: &Composition,
    parts: &[(Partition, usize)],
) -> Result<(LogProb, LogProb)> {
    if parts.len() != k {
        return Err(Error::InvalidArgument(format!(
            "expected {k} block labels, got {}",
            parts.len()
        )));
    }
    if m.k() != k || m.n() != n {
        return Err(Error::InvalidArgument(format!(
            "type {:?} is not a composition of {n} into {k} parts",
            m
        )));
    }
    let mut typed = f_c_type(n, k, m)?;
    let mut uniform = f_c_uniform(n, k)?;
    for (j, ((p, d_j), &m_j)) in parts.iter().zip(m.counts()).enumerate() {
        if p.n() != m_j as u64 {
            return Err(Error::InvalidArgument(format!(
                "block {j}: diagram {:?} has {} boxes but the type says {}",
                p,
                p.n(),
                m_j
            )));
        }
        if m_j == 0 {
            continue;
        }
        typed = typed.mul(f_q_irrep(m_j as u64, *d_j, p)?);
        uniform = uniform.mul(f_q_uniform(m_j as u64, *d_j)?);
    }
    Ok((typed, uniform))
}
