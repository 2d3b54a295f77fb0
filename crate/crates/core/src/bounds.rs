//! The concentration-bound evaluators: Azuma, Kato (with unconfirmed
//! expectation), the permutation-invariant quantum bound, the
//! i.i.d.-measurement classical bound, and the plain i.i.d. Sanov baseline.
//!
//! The two theorem-based evaluators share the same shape
//! `prefactor · max exp(−n·D)`; the prefactor lives in [`crate::coeffs`]
//! and the divergence optimum in [`crate::optimizer`].  Everything here is
//! deterministic: there is no randomness anywhere in the evaluators.

use crate::coeffs::{f_c_uniform, f_q_uniform, LogProb};
use crate::error::{Error, Result};
use crate::geometry::{expand_region, HalfspaceRegion};
use crate::optimizer::{min_kl_between_regions, InnerRegion, OptResult};

/// The bound families compared in the figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Azuma,
    Kato,
    QuantumPerm,
    ClassicalIidMeas,
    Iid,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Azuma,
        Method::Kato,
        Method::QuantumPerm,
        Method::ClassicalIidMeas,
        Method::Iid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Azuma => "azuma",
            Method::Kato => "kato",
            Method::QuantumPerm => "quantum",
            Method::ClassicalIidMeas => "classical",
            Method::Iid => "iid",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        match s {
            "azuma" => Some(Method::Azuma),
            "kato" => Some(Method::Kato),
            "quantum" => Some(Method::QuantumPerm),
            "classical" => Some(Method::ClassicalIidMeas),
            "iid" => Some(Method::Iid),
            _ => None,
        }
    }
}

/// Which of the deviation/failure-probability pair is pinned.
#[derive(Clone, Copy, Debug)]
pub enum FixedQuantity {
    Epsilon(f64),
    Delta(f64),
}

/// A fully resolved bound request (method, round count, pinned quantity).
#[derive(Clone, Copy, Debug)]
pub struct BoundSpec {
    pub method: Method,
    pub n: u64,
    pub fixed: FixedQuantity,
}

/// Deviation achieving failure probability `eps`:
/// `(1+γ)·√(ln(1/ε)/(2N))`.
pub fn azuma_delta(gamma: f64, n: u64, eps: f64) -> Result<f64> {
    check_gamma_n(gamma, n)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < ε ≤ 1, got {eps}")));
    }
    Ok((1.0 + gamma) * ((1.0 / eps).ln() / (2.0 * n as f64)).sqrt())
}

/// Failure probability at fixed deviation: `ln ε = −2NΔ²/(1+γ)²`.
pub fn azuma_epsilon(gamma: f64, n: u64, delta: f64) -> Result<LogProb> {
    check_gamma_n(gamma, n)?;
    if delta < 0.0 {
        return Err(Error::InvalidArgument("deviation must be nonnegative".into()));
    }
    Ok(LogProb::from_ln(
        -2.0 * n as f64 * delta * delta / ((1.0 + gamma) * (1.0 + gamma)),
    ))
}

/// Tuned martingale parameters `(α*, β*)` for an unconfirmed expectation
/// `B*` of the running sum, with `L = ln(1/eps_half)`.
pub fn kato_alpha_beta(b_star: f64, n: u64, eps_half: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    if !(b_star >= 0.0 && b_star <= nf) {
        return Err(Error::InvalidArgument(format!(
            "need 0 ≤ B* ≤ N, got B* = {b_star}, N = {n}"
        )));
    }
    if !(eps_half > 0.0 && eps_half < 1.0) {
        return Err(Error::InvalidArgument("need 0 < ε/2 < 1".into()));
    }
    let l = (1.0 / eps_half).ln();
    let bb = b_star * (nf - b_star);
    let common = (9.0 * nf + 8.0 * l) * (9.0 * bb + 2.0 * nf * l);
    let first = 27.0 * std::f64::consts::SQRT_2 * nf * (nf - 2.0 * b_star)
        * (l * (9.0 * bb + 2.0 * nf * l)).sqrt()
        / (4.0 * common);
    let second = (54.0 * nf.sqrt() * bb * l + 12.0 * nf.powf(1.5) * l * l) / common;
    let alpha = first - second;
    let beta = (alpha * alpha + l / 2.0 * (1.0 + 4.0 * alpha / (3.0 * nf.sqrt())).powi(2)).sqrt();
    Ok((alpha, beta))
}

/// Deviation achieving failure probability `eps` with unconfirmed prior
/// expectation `B*` and observed value `B̂`:
/// `(γ/√N)[β* − α*(1 − 2B̂/N)] + √(ln(2/ε)/(2N))`.
pub fn kato_delta(gamma: f64, n: u64, eps: f64, b_star: f64, b_hat: f64) -> Result<f64> {
    check_gamma_n(gamma, n)?;
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::InvalidArgument("need 0 < ε < 2".into()));
    }
    let (alpha, beta) = kato_alpha_beta(b_star, n, eps / 2.0)?;
    let nf = n as f64;
    Ok(gamma / nf.sqrt() * (beta - alpha * (1.0 - 2.0 * b_hat / nf))
        + ((2.0 / eps).ln() / (2.0 * nf)).sqrt())
}

/// Failure probability at fixed deviation: a two-exponential sum minimized
/// over the split parameter `Δ'` subject to `γ·ξ(B̂,B*,Δ')·Δ' ≤ Δ`, with
/// candidates violating the split rejected pointwise.  An empty feasible
/// interval degrades to the single-variable term `exp(−2NΔ²)`.
pub fn kato_epsilon(gamma: f64, n: u64, delta: f64, b_star: f64, b_hat: f64) -> Result<LogProb> {
    check_gamma_n(gamma, n)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument("deviation must be positive".into()));
    }
    let nf = n as f64;
    if !(b_star >= 0.0 && b_star <= nf) || !(b_hat >= 0.0 && b_hat <= nf) {
        return Err(Error::InvalidArgument("need 0 ≤ B*, B̂ ≤ N".into()));
    }
    let xi = |dp: f64| -> f64 {
        let tail = 1.0 - b_star / nf - 4.0 / 3.0 * dp;
        let den = 1.0 - (1.0 - 2.0 * b_star / nf) * tail;
        let num = 1.0 - (1.0 - 2.0 * b_hat / nf) * tail;
        num / den
    };
    let value = |dp: f64| -> f64 {
        // ln of the two-exponential sum; +inf when dp is infeasible.
        if dp < 0.0 {
            return f64::INFINITY;
        }
        let inner = 1.0 - 2.0 * b_star / nf - 4.0 / 3.0 * dp;
        let den = 1.0 - inner * inner;
        if dp > 0.0 && den <= 0.0 {
            return f64::INFINITY;
        }
        let spread = gamma * xi(dp) * dp;
        if spread > delta || !spread.is_finite() || spread < 0.0 {
            return f64::INFINITY;
        }
        let t1 = if dp == 0.0 { 0.0 } else { -2.0 * nf * dp * dp / den };
        let t2 = -2.0 * nf * (delta - spread) * (delta - spread);
        let hi = t1.max(t2);
        hi + ((t1 - hi).exp() + (t2 - hi).exp()).ln()
    };

    // Feasible Δ' never exceeds the point where the first exponential's
    // denominator closes, nor (roughly) Δ/γ when ξ ≈ 1.
    let dp_cap = (0.75 * (2.0 - 2.0 * b_star / nf)).min(10.0 * delta / gamma.max(1e-12));
    if !(dp_cap > 0.0) {
        return Ok(LogProb::from_ln(-2.0 * nf * delta * delta));
    }
    let mut best_x = 0.0;
    let mut best = value(0.0);
    let coarse = 400;
    for i in 1..=coarse {
        let x = dp_cap * i as f64 / coarse as f64;
        let v = value(x);
        if v < best {
            best = v;
            best_x = x;
        }
    }
    // Golden-section refinement around the best coarse point.
    let mut lo = (best_x - dp_cap / coarse as f64).max(0.0);
    let mut hi = (best_x + dp_cap / coarse as f64).min(dp_cap);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = value(x1);
    let mut f2 = value(x2);
    for _ in 0..120 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value(x2);
        }
    }
    best = best.min(f1).min(f2);
    if !best.is_finite() && best > 0.0 {
        // No feasible split at all: single-variable term only.
        return Ok(LogProb::from_ln(-2.0 * nf * delta * delta));
    }
    Ok(LogProb::from_ln(best))
}

/// `ln max_{p∈A, q∈B} exp(−N·D(p‖q))` for an i.i.d. source, via the
/// alternating optimizer.
pub fn sanov_iid_epsilon(
    a: &HalfspaceRegion,
    b: InnerRegion<'_>,
    n: u64,
    tol: f64,
) -> Result<(LogProb, OptResult)> {
    let opt = min_kl_between_regions(a, b, n, tol)?;
    Ok((opt.log_bound, opt))
}

/// Permutation-invariant quantum bound: the i.i.d. optimum times the
/// uniform quantum prefactor for local dimension `d`.
pub fn quantum_perm_epsilon(
    a: &HalfspaceRegion,
    b: InnerRegion<'_>,
    n: u64,
    d: usize,
    tol: f64,
) -> Result<(LogProb, OptResult)> {
    let (iid, opt) = sanov_iid_epsilon(a, b, n, tol)?;
    Ok((iid.mul(f_q_uniform(n, d)?), opt))
}

/// A family of cut regions for the i.i.d.-measurement bound: either one
/// fixed region or a scalar-parameterized family whose free parameter is
/// minimized over.
pub enum RegionFamily<'a> {
    Fixed(&'a HalfspaceRegion),
    Parametrized {
        lo: f64,
        hi: f64,
        region: &'a dyn Fn(f64) -> Result<HalfspaceRegion>,
    },
}

/// Result of the i.i.d.-measurement (classical) bound.
#[derive(Clone, Debug)]
pub struct ClassicalIidBound {
    pub log_epsilon: LogProb,
    /// Chosen family parameter, when a family was searched.
    pub parameter: Option<f64>,
    pub opt: OptResult,
}

/// I.i.d.-measurement bound: `f_c(N,k)·exp(−N·D*)` where `D*` maximizes
/// the region-to-region divergence over the family parameter, each member
/// expanded by its `O(1/N)` offset first.  The family search is a coarse
/// scan with golden-section refinement.
pub fn classical_iidmeas_epsilon(
    a: &HalfspaceRegion,
    family: &RegionFamily<'_>,
    n: u64,
    tol: f64,
) -> Result<ClassicalIidBound> {
    let k = a.k();
    let prefactor = f_c_uniform(n, k)?;
    let eval = |region: &HalfspaceRegion| -> Result<OptResult> {
        if !region.is_vertex_exclusion_form() {
            return Err(Error::InvalidArgument(
                "family member is not in vertex-exclusion normal form".into(),
            ));
        }
        let expanded = expand_region(region, n)?;
        min_kl_between_regions(a, InnerRegion::Halfspace(&expanded), n, tol)
    };
    match family {
        RegionFamily::Fixed(region) => {
            let opt = eval(region)?;
            Ok(ClassicalIidBound {
                log_epsilon: prefactor.mul(opt.log_bound),
                parameter: None,
                opt,
            })
        }
        RegionFamily::Parametrized { lo, hi, region } => {
            if !(hi > lo) {
                return Err(Error::EmptyFamily(format!(
                    "parameter interval [{lo}, {hi}] is empty"
                )));
            }
            let g = |x: f64| -> Result<Option<(f64, OptResult)>> {
                match region(x) {
                    Ok(r) => {
                        let opt = eval(&r)?;
                        Ok(Some((opt.divergence, opt)))
                    }
                    Err(Error::InvalidArgument(_)) | Err(Error::EmptyRegion(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            };
            // Coarse scan for a bracket of the divergence maximum.
            let coarse = 24usize;
            let xs: Vec<f64> = (0..=coarse)
                .map(|i| lo + (hi - lo) * i as f64 / coarse as f64)
                .collect();
            let mut best: Option<(f64, f64, OptResult)> = None;
            for &x in &xs {
                if let Some((d, opt)) = g(x)? {
                    if best.as_ref().map_or(true, |(bd, _, _)| d > *bd) {
                        best = Some((d, x, opt));
                    }
                }
            }
            let (_, bx, _) = best.as_ref().ok_or_else(|| {
                Error::EmptyFamily(
                    "no admissible parameter: every member violated the normal-form constraint"
                        .into(),
                )
            })?;
            let span = (hi - lo) / coarse as f64;
            let mut glo = (bx - span).max(*lo);
            let mut ghi = (bx + span).min(*hi);
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let gval = |x: f64, cache: &mut Option<(f64, f64, OptResult)>| -> Result<f64> {
                match g(x)? {
                    Some((d, opt)) => {
                        if cache.as_ref().map_or(true, |(bd, _, _)| d > *bd) {
                            *cache = Some((d, x, opt));
                        }
                        Ok(d)
                    }
                    None => Ok(f64::NEG_INFINITY),
                }
            };
            let mut cache = best.clone();
            let mut x1 = ghi - phi * (ghi - glo);
            let mut x2 = glo + phi * (ghi - glo);
            let mut f1 = gval(x1, &mut cache)?;
            let mut f2 = gval(x2, &mut cache)?;
            for _ in 0..80 {
                if f1 >= f2 {
                    ghi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = ghi - phi * (ghi - glo);
                    f1 = gval(x1, &mut cache)?;
                } else {
                    glo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = glo + phi * (ghi - glo);
                    f2 = gval(x2, &mut cache)?;
                }
            }
            let (_, x_star, opt) = cache.unwrap();
            Ok(ClassicalIidBound {
                log_epsilon: prefactor.mul(opt.log_bound),
                parameter: Some(x_star),
                opt,
            })
        }
    }
}

/// Invert a nonincreasing `Δ ↦ ln ε` map by bisection: returns the `Δ`
/// at which the bound crosses `target_ln_eps`, resolved to better than
/// `1e-15` of the bracket after 60 halvings.
pub fn delta_from_epsilon(
    target_ln_eps: f64,
    delta_hi: f64,
    eval_ln_eps: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if !(delta_hi > 0.0) {
        return Err(Error::InvalidArgument("bracket must be positive".into()));
    }
    if eval_ln_eps(0.0)? <= target_ln_eps {
        return Ok(0.0);
    }
    if eval_ln_eps(delta_hi)? > target_ln_eps {
        return Err(Error::InvalidArgument(format!(
            "bound at Δ = {delta_hi} is still above the target"
        )));
    }
    let mut lo = 0.0f64;
    let mut hi = delta_hi;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if eval_ln_eps(mid)? > target_ln_eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_gamma_n(gamma: f64, n: u64) -> Result<()> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("need γ > 0, got {gamma}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need N ≥ 1".into()));
    }
    Ok(())
}
