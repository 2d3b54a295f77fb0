//! Estimation toy model: bound the frequency of one projective outcome
//! from the frequency of a tilted one, against an adversarial N-qubit
//! state.
//!
//! Round measurement: with probability ½ the computational pair
//! `{|0⟩⟨0|, |1⟩⟨1|}`, else the tilted pair `{|φ₀⟩⟨φ₀|, |φ₁⟩⟨φ₁|}` with
//! `|φ₁⟩ = √r|0⟩ − √(1−r)|1⟩`.  The two "0" outcomes are merged, giving a
//! three-outcome channel.  The failure event is an empirical frequency in
//! `A(γ,Δ) = {p₁ − γp₂ ≥ m(γ) + Δ}`, where `m(γ)` bounds the per-round
//! conditional expectation of `â − γb̂`.

use nalgebra::{Complex, DMatrix};

use crate::bounds::{
    azuma_delta, azuma_epsilon, classical_iidmeas_epsilon, delta_from_epsilon, kato_delta,
    kato_epsilon, quantum_perm_epsilon, sanov_iid_epsilon, Method, RegionFamily,
};
use crate::coeffs::LogProb;
use crate::error::{Error, Result};
use crate::geometry::{toy_measurement_image, HalfspaceRegion};
use crate::optimizer::{InnerRegion, DEFAULT_TOL};
use crate::repcore::HermitianOp;

/// Parameters of one toy-model evaluation.  `b_star` is the prior
/// (unconfirmed) expectation of the tilted-outcome count; `b_hat` the
/// observed value (the model sweeps fix `b_hat = b_star`).
#[derive(Clone, Copy, Debug)]
pub struct ToyModelParams {
    pub r: f64,
    pub gamma: f64,
    pub n: u64,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub b_star: f64,
    pub b_hat: f64,
}

impl ToyModelParams {
    /// Figure defaults: `r = 0.01`, `γ = 1.662`, `B* = B̂ = 0.01·N`.
    pub fn paper_defaults(n: u64) -> Self {
        let b = super::defaults::B_STAR_FRACTION * n as f64;
        ToyModelParams {
            r: super::defaults::R,
            gamma: super::defaults::GAMMA,
            n,
            eps: None,
            delta: None,
            b_star: b,
            b_hat: b,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidArgument(format!("need 0 < r < 1, got {}", self.r)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("need γ > 0, got {}", self.gamma)));
        }
        if self.eps.is_some() == self.delta.is_some() {
            return Err(Error::InvalidArgument(
                "exactly one of ε and Δ must be fixed".into(),
            ));
        }
        Ok(())
    }
}

/// Upper bound `m(γ)` on the per-round conditional expectation of
/// `â − γ·b̂`: the largest eigenvalue of the constraint operator,
/// `(1 − γ + √((1−γ)² + 4rγ))/4` in closed form.
pub fn expectation_upper_bound(gamma: f64, r: f64) -> f64 {
    0.25 * (1.0 - gamma + ((1.0 - gamma) * (1.0 - gamma) + 4.0 * r * gamma).sqrt())
}

/// The constraint operator `½|1⟩⟨1| − (γ/2)|φ₁⟩⟨φ₁|` whose top eigenvalue
/// is [`expectation_upper_bound`].
pub fn constraint_operator(gamma: f64, r: f64) -> Result<HermitianOp> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < r < 1, got {r}")));
    }
    type C = Complex<f64>;
    let sr = r.sqrt();
    let s1 = (1.0 - r).sqrt();
    // |φ₁⟩⟨φ₁| with |φ₁⟩ = √r|0⟩ − √(1−r)|1⟩.
    let phi = DMatrix::from_row_slice(
        2,
        2,
        &[
            C::new(r, 0.0),
            C::new(-sr * s1, 0.0),
            C::new(-sr * s1, 0.0),
            C::new(1.0 - r, 0.0),
        ],
    );
    let one = DMatrix::from_row_slice(
        2,
        2,
        &[C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)],
    );
    HermitianOp::from_matrix(one * C::new(0.5, 0.0) + phi * C::new(-gamma / 2.0, 0.0))
}

/// Failure region `A(γ,Δ) = {p : p₁ − γp₂ ≥ m(γ) + Δ}`.
pub fn failure_region(gamma: f64, delta: f64, r: f64) -> Result<HalfspaceRegion> {
    let m = expectation_upper_bound(gamma, r);
    HalfspaceRegion::at_least(vec![1.0, -gamma, 0.0], m + delta)
}

/// Tangent cut `{p : p₁ − γ'p₂ ≤ m(γ')}` in the normalized
/// vertex-exclusion form required by the i.i.d.-measurement bound; valid
/// for `0 ≤ m(γ') < 1`.
pub fn tangent_region(gamma_prime: f64, r: f64) -> Result<HalfspaceRegion> {
    let m = expectation_upper_bound(gamma_prime, r);
    if !(0.0..1.0).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "m(γ') = {m} violates 0 ≤ m < 1"
        )));
    }
    HalfspaceRegion::cut_toward_first_vertex(&[1.0, -gamma_prime, 0.0], m)
}

/// Admissible bracket for the tangent-family parameter: endpoints with
/// `0 ≤ m(γ') < 1`, located by bisection when an endpoint is out of range.
fn family_bracket(r: f64) -> (f64, f64) {
    const HI: f64 = 256.0;
    let ok = |g: f64| {
        let m = expectation_upper_bound(g, r);
        (0.0..1.0).contains(&m)
    };
    let mut lo = 0.0;
    if !ok(lo) {
        let (mut bad, mut good) = (lo, HI);
        for _ in 0..80 {
            let mid = 0.5 * (bad + good);
            if ok(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        lo = good;
    }
    // m is nonincreasing and stays in [0, ½] for γ' ≥ 0, so the upper end
    // is capped by search range alone.
    (lo, HI)
}

/// Deviation `Δ(γ,N,ε)` for the chosen method; theorem-based methods are
/// inverted from their ε-form by monotone bisection.
pub fn toy_delta(method: Method, params: &ToyModelParams) -> Result<f64> {
    params.validate()?;
    let eps = params
        .eps
        .ok_or_else(|| Error::InvalidArgument("deviation sweeps fix ε".into()))?;
    match method {
        Method::Azuma => azuma_delta(params.gamma, params.n, eps),
        Method::Kato => kato_delta(params.gamma, params.n, eps, params.b_star, params.b_hat),
        Method::QuantumPerm | Method::ClassicalIidMeas | Method::Iid => {
            let m = expectation_upper_bound(params.gamma, params.r);
            // A(γ,Δ) empties above Δ = 1 − m (only the first vertex would
            // remain); stop a hair short so the bound is finite.
            let hi = 1.0 - m - 1e-9;
            let with_delta = ToyModelParams { delta: Some(1.0), eps: None, ..*params };
            delta_from_epsilon(eps.ln(), hi, |delta| {
                let p = ToyModelParams { delta: Some(delta), ..with_delta };
                Ok(toy_epsilon(method, &p)?.ln())
            })
        }
    }
}

/// Failure probability `ε(γ,N,Δ)` for the chosen method, in log scale.
/// Values above one mean the bound is trivially true at that deviation.
pub fn toy_epsilon(method: Method, params: &ToyModelParams) -> Result<LogProb> {
    params.validate()?;
    let delta = params
        .delta
        .ok_or_else(|| Error::InvalidArgument("failure-probability sweeps fix Δ".into()))?;
    match method {
        Method::Azuma => azuma_epsilon(params.gamma, params.n, delta),
        Method::Kato => {
            if delta == 0.0 {
                return Ok(LogProb::ONE);
            }
            kato_epsilon(params.gamma, params.n, delta, params.b_star, params.b_hat)
        }
        Method::QuantumPerm => {
            let a = failure_region(params.gamma, delta, params.r)?;
            let image = toy_measurement_image(params.r)?;
            let (eps, _) =
                quantum_perm_epsilon(&a, InnerRegion::Bloch(&image), params.n, 2, DEFAULT_TOL)?;
            Ok(eps)
        }
        Method::Iid => {
            let a = failure_region(params.gamma, delta, params.r)?;
            let image = toy_measurement_image(params.r)?;
            let (eps, _) = sanov_iid_epsilon(&a, InnerRegion::Bloch(&image), params.n, DEFAULT_TOL)?;
            Ok(eps)
        }
        Method::ClassicalIidMeas => {
            let a = failure_region(params.gamma, delta, params.r)?;
            let (lo, hi) = family_bracket(params.r);
            let r = params.r;
            let member = move |gp: f64| tangent_region(gp, r);
            let family = RegionFamily::Parametrized { lo, hi, region: &member };
            let out = classical_iidmeas_epsilon(&a, &family, params.n, DEFAULT_TOL)?;
            Ok(out.log_epsilon)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{f_c_uniform, f_q_uniform};
    use nalgebra::Complex;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn expectation_bound_known_values() {
        assert!((expectation_upper_bound(0.0, 0.3) - 0.5).abs() < 1e-15);
        // Collapses to √(4r)/4 at γ = 1.
        assert!((expectation_upper_bound(1.0, 0.01) - 0.05).abs() < 1e-15);
        let m = expectation_upper_bound(1.662, 0.01);
        assert!((m - 0.012110).abs() < 1e-6);
        assert!((1.662 * 0.01 + m - 0.028730).abs() < 1e-6);
    }

    #[test]
    fn expectation_bound_is_the_top_eigenvalue() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let gamma = rng.random::<f64>() * 6.0 - 1.0;
            let r = rng.random::<f64>() * 0.98 + 0.01;
            let op = constraint_operator(gamma, r).unwrap();
            let top = *op.eigenvalues().last().unwrap();
            let m = expectation_upper_bound(gamma, r);
            assert!((top - m).abs() < 1e-12, "γ={gamma} r={r}: {top} vs {m}");
        }
    }

    #[test]
    fn bloch_net_never_exceeds_the_bound() {
        // sup_ρ Tr[M_c ρ] over a dense pure-state net reaches m(γ).
        let (gamma, r) = (1.662, 0.01);
        let op = constraint_operator(gamma, r).unwrap();
        let m = expectation_upper_bound(gamma, r);
        let mut sup = f64::NEG_INFINITY;
        let net = 1000;
        for i in 0..net {
            let theta = std::f64::consts::PI * i as f64 / (net - 1) as f64;
            let v = [
                Complex::new((theta / 2.0).cos(), 0.0),
                Complex::new((theta / 2.0).sin(), 0.0),
            ];
            let rho = HermitianOp::projector(&v).unwrap();
            sup = sup.max(op.expectation(&rho));
            // The complex phase never helps a real operator, but sweep a
            // few to witness it.
            let w = [v[0], v[1] * Complex::new(0.0, 1.0)];
            let rho = HermitianOp::projector(&w).unwrap();
            sup = sup.max(op.expectation(&rho));
        }
        assert!(sup <= m + 1e-12);
        assert!((sup - m).abs() < 1e-6);
    }

    #[test]
    fn measurement_image_sits_inside_every_tangent_cut() {
        let r = 0.01;
        let image = toy_measurement_image(r).unwrap();
        for k in 0..8 {
            let gp = 0.25 * (k as f64 + 0.1);
            let region = tangent_region(gp, r).unwrap();
            for i in 0..64 {
                let theta = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
                let p = image.probabilities([theta.cos(), 0.0, theta.sin()]).unwrap();
                assert!(region.contains(&p), "γ'={gp} θ={theta}");
            }
        }
    }

    #[test]
    fn azuma_figure_value() {
        let params = ToyModelParams::paper_defaults(1_000_000).with_eps(1e-30);
        let d = toy_delta(Method::Azuma, &params).unwrap();
        assert!((d - 0.015645).abs() < 1e-6);
    }

    #[test]
    fn zero_deviation_gives_trivial_bounds() {
        let params = ToyModelParams::paper_defaults(1000).with_delta(0.0);
        for m in [Method::Azuma, Method::Kato, Method::QuantumPerm, Method::ClassicalIidMeas, Method::Iid] {
            let eps = toy_epsilon(m, &params).unwrap();
            assert!(eps.ln() >= -1e-12, "{m:?} should be trivial at Δ = 0");
        }
        // Azuma is exactly one.
        assert!(toy_epsilon(Method::Azuma, &params).unwrap().ln().abs() < 1e-15);
    }

    #[test]
    fn epsilon_one_sends_azuma_delta_to_zero() {
        let params = ToyModelParams::paper_defaults(1000).with_eps(1.0);
        assert_eq!(toy_delta(Method::Azuma, &params).unwrap(), 0.0);
    }

    #[test]
    fn prefactor_gaps_are_exact_by_construction() {
        // Deterministic evaluators: the quantum and classical curves sit
        // above the i.i.d. one by exactly their uniform prefactors (the
        // classical one also pays a small region-expansion term).
        let n = 20_000u64;
        let params = ToyModelParams::paper_defaults(n).with_delta(0.01);
        let iid = toy_epsilon(Method::Iid, &params).unwrap().ln();
        let q = toy_epsilon(Method::QuantumPerm, &params).unwrap().ln();
        let gap_q = q - iid;
        let want_q = f_q_uniform(n, 2).unwrap().ln();
        assert!((gap_q - want_q).abs() < 1e-9, "{gap_q} vs {want_q}");

        let c = toy_epsilon(Method::ClassicalIidMeas, &params).unwrap().ln();
        let gap_c = c - iid;
        let want_c = f_c_uniform(n, 3).unwrap().ln();
        assert!(gap_c >= want_c - 1e-9);
        assert!(gap_c - want_c < 0.5, "expansion term unexpectedly large: {}", gap_c - want_c);
    }

    #[test]
    fn figure_two_ordering_at_one_point() {
        let params = ToyModelParams::paper_defaults(1_000_000).with_eps(1e-30);
        let d_azuma = toy_delta(Method::Azuma, &params).unwrap();
        let d_kato = toy_delta(Method::Kato, &params).unwrap();
        let d_q = toy_delta(Method::QuantumPerm, &params).unwrap();
        let d_c = toy_delta(Method::ClassicalIidMeas, &params).unwrap();
        let d_iid = toy_delta(Method::Iid, &params).unwrap();
        assert!(d_azuma > d_kato, "{d_azuma} vs {d_kato}");
        assert!(d_kato > d_q, "{d_kato} vs {d_q}");
        assert!(d_q >= d_c - 1e-12, "{d_q} vs {d_c}");
        assert!(d_c >= d_iid - 1e-12, "{d_c} vs {d_iid}");
    }
}
