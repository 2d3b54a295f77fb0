//! PBC00 three-state QKD: per-round bit/phase error operators and the
//! finite-size key rate under four concentration bounds.
//!
//! The trine signals are `t_j = R_y(2πj/3)|ψ₁⟩` with
//! `|ψ₁⟩ = cos(2π/3)|+⟩ + sin(2π/3)|−⟩`; round `r` sends `t_r` or
//! `t_{r+1}` keyed by Alice's bit.  Bob's conclusive filter for a round is
//! the square root of the two complementary-outcome POVM elements, whose
//! singular values are exactly `1` and `1/√3` — the filter
//! `F = |0⟩⟨0| + 3^{-1/2}|1⟩⟨1|` in the pair basis.  Because the public
//! trit is uniform and unknown to the adversary when the state is made,
//! the adversary-facing error observables live in the channel (Choi)
//! picture, averaged over rounds; there the phase observable is exactly
//! `5/4` times the bit observable, so the bit-phase information trade-off
//! holds with equality.

use nalgebra::DMatrix;

use crate::bounds::{delta_from_epsilon, kato_alpha_beta, Method};
use crate::coeffs::{f_c_uniform, f_q_uniform};
use crate::error::{Error, Result};
use crate::geometry::{expand_region, HalfspaceRegion};
use crate::optimizer::{min_kl_between_regions, InnerRegion, DEFAULT_TOL};
use crate::repcore::HermitianOp;

/// Finite-size model inputs.  Counts are carried as their expected values
/// (`n_sift = N/4`, `n_bit = N/400` under the paper model); `n_bit_star`
/// is the unconfirmed prior used by the Kato bound.
#[derive(Clone, Copy, Debug)]
pub struct QkdParams {
    pub n: u64,
    pub eps: f64,
    pub s: f64,
    pub s_prime: f64,
    pub n_sift: f64,
    pub n_bit: f64,
    pub n_bit_star: f64,
}

impl QkdParams {
    /// Paper model: conclusive rate ½, sift rate ¼, one percent bit error
    /// rate, `ε = 2^{−102}`, `s = 102`, `s' = 50`.
    pub fn paper_defaults(n: u64) -> Self {
        Self::from_model(
            n,
            super::defaults::EPSILON_QKD,
            super::defaults::S,
            super::defaults::S_PRIME,
            super::defaults::BIT_ERROR_RATE,
        )
    }

    /// Model with expectations filled in from a bit error rate.
    pub fn from_model(n: u64, eps: f64, s: f64, s_prime: f64, bit_error_rate: f64) -> Self {
        let nf = n as f64;
        let n_bit = bit_error_rate * nf / 4.0;
        QkdParams {
            n,
            eps,
            s,
            s_prime,
            n_sift: nf / 4.0,
            n_bit,
            n_bit_star: n_bit,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("need N ≥ 1".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidArgument("need 0 < ε < 1".into()));
        }
        if !(self.n_sift > 0.0 && self.n_sift <= self.n as f64) {
            return Err(Error::InvalidArgument("need 0 < N_sift ≤ N".into()));
        }
        if !(self.n_bit >= 0.0 && self.n_bit <= self.n as f64 - self.n_sift) {
            return Err(Error::InvalidArgument(
                "need 0 ≤ N_bit ≤ N − N_sift".into(),
            ));
        }
        Ok(())
    }
}

/// Round error observables `(Π_bit, Π_ph)` in the channel picture:
/// pairing either with the Choi matrix of the attack channel gives the
/// per-round probability of a conclusive bit (phase) error, averaged over
/// the public trit.  Both are PSD with `Π_ph ≤ (5/4)·Π_bit` (tightly — the
/// trine makes it an equality of observables).
pub fn pbc00_operators() -> Result<(HermitianOp, HermitianOp)> {
    let trine = trine_states();
    let trine_perp: Vec<[f64; 2]> = trine.iter().map(|t| [-t[1], t[0]]).collect();

    let mut w_bit = DMatrix::<f64>::zeros(4, 4);
    let mut w_ph = DMatrix::<f64>::zeros(4, 4);
    for r in 0..3usize {
        let (pib, piph, state) = round_error_operators(&trine, &trine_perp, r)?;
        w_bit += choi_observable(&state, &pib) / 3.0;
        w_ph += choi_observable(&state, &piph) / 3.0;
    }
    Ok((
        HermitianOp::from_real(w_bit)?,
        HermitianOp::from_real(w_ph)?,
    ))
}

/// The trine signal states in the computational basis.
fn trine_states() -> Vec<[f64; 2]> {
    let sq = std::f64::consts::FRAC_1_SQRT_2;
    let base = 2.0 * std::f64::consts::PI / 3.0;
    let psi1 = [
        base.cos() * sq + base.sin() * sq,
        base.cos() * sq - base.sin() * sq,
    ];
    (0..3)
        .map(|r| {
            let m = rotation_y(2.0 * std::f64::consts::PI * r as f64 / 3.0);
            [
                m[0][0] * psi1[0] + m[0][1] * psi1[1],
                m[1][0] * psi1[0] + m[1][1] * psi1[1],
            ]
        })
        .collect()
}

/// `R_y(θ)` as a real 2×2 matrix (Bloch rotation by θ about y).
fn rotation_y(theta: f64) -> [[f64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [[c, -s], [s, c]]
}

/// Per-round (state-picture) error operators on Alice's key qubit and
/// Bob's received qubit, plus the purified round state.
fn round_error_operators(
    trine: &[[f64; 2]],
    perp: &[[f64; 2]],
    r: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let s0 = r % 3;
    let s1 = (r + 1) % 3;
    let proj = |v: [f64; 2]| {
        DMatrix::from_row_slice(2, 2, &[v[0] * v[0], v[0] * v[1], v[1] * v[0], v[1] * v[1]])
    };
    // Conclusive POVM part and its square-root filter: eigenvalues 1 and
    // 1/3, so the filter is F in the pair eigenbasis.
    let m_conc = (proj(perp[s0]) + proj(perp[s1])) * (2.0 / 3.0);
    let eig = m_conc.clone().symmetric_eigen();
    let mut filter = DMatrix::<f64>::zeros(2, 2);
    let mut filter_inv = DMatrix::<f64>::zeros(2, 2);
    for i in 0..2 {
        let val = eig.eigenvalues[i].max(0.0);
        let v = eig.eigenvectors.column(i);
        let pv = DMatrix::from_fn(2, 2, |a, b| v[a] * v[b]);
        filter += &pv * val.sqrt();
        filter_inv += &pv / val.sqrt();
    }
    // Virtual key basis: the filter-normalized images of the conclusive
    // outcomes, phase-fixed so the noiseless round is the canonical
    // maximally entangled pair.
    let normalize = |v: DMatrix<f64>| {
        let n = (v[(0, 0)] * v[(0, 0)] + v[(1, 0)] * v[(1, 0)]).sqrt();
        [v[(0, 0)] / n, v[(1, 0)] / n]
    };
    let col = |v: [f64; 2]| DMatrix::from_column_slice(2, 1, &v);
    let mut beta1 = normalize(&filter_inv * col(perp[s0]));
    let mut beta0 = normalize(&filter_inv * col(perp[s1]));
    let went0 = &filter * col(trine[s0]);
    let went1 = &filter * col(trine[s1]);
    if beta0[0] * went0[(0, 0)] + beta0[1] * went0[(1, 0)] < 0.0 {
        beta0 = [-beta0[0], -beta0[1]];
    }
    if beta1[0] * went1[(0, 0)] + beta1[1] * went1[(1, 0)] < 0.0 {
        beta1 = [-beta1[0], -beta1[1]];
    }
    let sq = std::f64::consts::FRAC_1_SQRT_2;
    let beta_plus = [sq * (beta0[0] + beta1[0]), sq * (beta0[1] + beta1[1])];
    let beta_minus = [sq * (beta0[0] - beta1[0]), sq * (beta0[1] - beta1[1])];

    let p0 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let p1 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
    let pp = proj([sq, sq]);
    let pm = proj([sq, -sq]);

    // Bit error: the conclusive outcome that contradicts Alice's bit.
    let pib = p0.kronecker(&(proj(perp[s0]) * (2.0 / 3.0)))
        + p1.kronecker(&(proj(perp[s1]) * (2.0 / 3.0)));
    // Phase error: complementary-basis disagreement on the virtual pair,
    // pulled back through the filter.
    let piph = pp.kronecker(&(&filter * proj(beta_minus) * &filter))
        + pm.kronecker(&(&filter * proj(beta_plus) * &filter));

    // Purified round state (|0⟩ t_{s0} + |1⟩ t_{s1})/√2.
    let mut psi = DMatrix::<f64>::zeros(4, 1);
    psi[(0, 0)] = trine[s0][0] * sq;
    psi[(1, 0)] = trine[s0][1] * sq;
    psi[(2, 0)] = trine[s1][0] * sq;
    psi[(3, 0)] = trine[s1][1] * sq;
    let state = &psi * psi.transpose();
    Ok((pib, piph, state))
}

/// Fold a round state and a state-picture observable into the observable
/// on the attack channel's Choi matrix (input ⊗ output of Bob's qubit).
fn choi_observable(state: &DMatrix<f64>, observable: &DMatrix<f64>) -> DMatrix<f64> {
    let mut w = DMatrix::<f64>::zeros(4, 4);
    for a in 0..2 {
        for a2 in 0..2 {
            for bo in 0..2 {
                for bo2 in 0..2 {
                    for bi in 0..2 {
                        for bi2 in 0..2 {
                            w[(2 * bi + bo, 2 * bi2 + bo2)] += state[(2 * a + bi, 2 * a2 + bi2)]
                                * observable[(2 * a2 + bo2, 2 * a + bo)];
                        }
                    }
                }
            }
        }
    }
    let wt = w.transpose();
    (w + wt) * 0.5
}

/// Binary entropy `h(x) = −x log₂ x − (1−x) log₂(1−x)`, clamped to
/// `[0, 1]` with `h(0) = h(1) = 0` by continuity.
pub fn binary_entropy(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -(x * x.log2() + (1.0 - x) * (1.0 - x).log2())
}

/// The single-cut region containing every reachable
/// (phase, bit, rest) distribution: `{p : p₁ ≤ (5/4)p₂}`.
pub fn qkd_outcome_region() -> HalfspaceRegion {
    HalfspaceRegion::less_equal(vec![1.0, -1.25, 0.0], 0.0).expect("static normal")
}

/// Failure set `A(δ) = {p : p₁ ≥ (5/4)p₂ + δ}`.
pub fn qkd_failure_region(delta: f64) -> HalfspaceRegion {
    HalfspaceRegion::at_least(vec![1.0, -1.25, 0.0], delta).expect("static normal")
}

/// Phase-error count bound `U(N̂_bit)` at failure probability `ε` for the
/// chosen method.  The theorem-based methods locate their deviation by
/// ε-bisection over `δ ∈ [0, 1]`; if even `δ = 1` cannot reach `ε` (tiny
/// `N`), the bound saturates at `U = N`.
pub fn pbc00_phase_error_upper(method: Method, params: &QkdParams) -> Result<f64> {
    params.validate()?;
    let nf = params.n as f64;
    match method {
        Method::Azuma => {
            Ok(1.25 * params.n_bit + 2.25 * (nf * (1.0 / params.eps).ln() / 2.0).sqrt())
        }
        Method::Kato => {
            // The cut slope 5/4 plays the role of the estimation parameter.
            let (alpha, beta) = kato_alpha_beta(params.n_bit_star, params.n, params.eps / 2.0)?;
            Ok(1.25 * params.n_bit
                + (nf * (2.0 / params.eps).ln() / 2.0).sqrt()
                + 1.25 * nf.sqrt() * (beta - alpha * (1.0 - 2.0 * params.n_bit / nf)))
        }
        Method::QuantumPerm => {
            let prefactor = f_q_uniform(params.n, 4)?.ln();
            deviation_bound(params, prefactor, false).map(|d| 1.25 * params.n_bit + nf * d)
        }
        Method::ClassicalIidMeas => {
            let prefactor = f_c_uniform(params.n, 3)?.ln();
            deviation_bound(params, prefactor, true).map(|d| 1.25 * params.n_bit + nf * d)
        }
        Method::Iid => Err(Error::InvalidArgument(
            "the i.i.d. baseline is exposed separately".into(),
        )),
    }
}

/// The i.i.d. Sanov baseline for the same failure set (no prefactor, no
/// region expansion); comparison diagnostic only.
pub fn pbc00_phase_error_upper_iid_baseline(params: &QkdParams) -> Result<f64> {
    params.validate()?;
    deviation_bound(params, 0.0, false).map(|d| 1.25 * params.n_bit + params.n as f64 * d)
}

fn deviation_bound(params: &QkdParams, ln_prefactor: f64, expand: bool) -> Result<f64> {
    let n = params.n;
    let region = qkd_outcome_region();
    let inner = if expand { expand_region(&region, n)? } else { region };
    let eval = |delta: f64| -> Result<f64> {
        let a = qkd_failure_region(delta);
        let opt = min_kl_between_regions(&a, InnerRegion::Halfspace(&inner), n, DEFAULT_TOL)?;
        Ok(ln_prefactor + opt.log_bound.ln())
    };
    match delta_from_epsilon(params.eps.ln(), 1.0, eval) {
        Ok(d) => Ok(d),
        Err(Error::InvalidArgument(_)) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// A finite-size key rate; `saturated` flags a phase-error bound beyond
/// the sifted block (rate reported as `−∞`).
#[derive(Clone, Copy, Debug)]
pub struct KeyRate {
    pub rate: f64,
    pub phase_error_upper: f64,
    pub saturated: bool,
}

/// Net key gain per round:
/// `(N_sift[1 − h(N_bit/N_sift) − h(U/N_sift)] − s − s')/N`.
pub fn pbc00_key_rate(method: Method, params: &QkdParams) -> Result<KeyRate> {
    let u = pbc00_phase_error_upper(method, params)?;
    Ok(key_rate_from_upper(params, u))
}

/// Key rate with the i.i.d. baseline substituted for `U`.
pub fn pbc00_key_rate_iid_baseline(params: &QkdParams) -> Result<KeyRate> {
    let u = pbc00_phase_error_upper_iid_baseline(params)?;
    Ok(key_rate_from_upper(params, u))
}

fn key_rate_from_upper(params: &QkdParams, u: f64) -> KeyRate {
    if u / params.n_sift > 1.0 {
        return KeyRate {
            rate: f64::NEG_INFINITY,
            phase_error_upper: u,
            saturated: true,
        };
    }
    let rate = (params.n_sift
        * (1.0 - binary_entropy(params.n_bit / params.n_sift) - binary_entropy(u / params.n_sift))
        - params.s
        - params.s_prime)
        / params.n as f64;
    KeyRate { rate, phase_error_upper: u, saturated: false }
}

/// The deviation-free rate (formula evaluation only): `U = (5/4)N̂_bit`.
pub fn pbc00_asymptotic_rate(params: &QkdParams) -> f64 {
    key_rate_from_upper(params, 1.25 * params.n_bit).rate
}
