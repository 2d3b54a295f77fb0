//! Minimize `D(p‖q)` over `p ∈ A`, `q ∈ B` for convex regions of the
//! simplex, reporting the bound `exp(−n·D)`.
//!
//! The joint problem is convex, so alternating the two one-sided
//! minimizations converges to the global optimum.  Both one-sided steps
//! against a halfspace are solved exactly: the `p`-side is an exponential
//! tilt of `q` with the dual multiplier found by bisection, and the
//! `q`-side is the stationarity system `q_i = p_i/(μ + λ w_i)`, with a
//! closed form when mass must be parked on an outcome outside `supp(p)`.
//! Against a qubit measurement image, the `q`-side runs projected gradient
//! descent over the Bloch ball, where the objective stays convex because
//! the map to outcome probabilities is affine.

use crate::coeffs::LogProb;
use crate::error::{Error, Result};
use crate::geometry::{
    kl_divergence, HalfspaceRegion, ProbVec, QubitMeasurementImage, MEMBERSHIP_TOL,
};

/// Default tolerance on successive divergence values.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Iteration cap for the alternating loop.
pub const MAX_ITERATIONS: usize = 10_000;

/// Default grid-oracle resolution per barycentric axis at `k = 3`.
pub const DEFAULT_GRID_RESOLUTION: u32 = 2000;

/// The feasible set for the inner (`q`) maximizer.
#[derive(Clone, Copy, Debug)]
pub enum InnerRegion<'a> {
    Halfspace(&'a HalfspaceRegion),
    Bloch(&'a QubitMeasurementImage),
    Singleton(&'a ProbVec),
}

/// Which side the alternating loop updates first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepOrder {
    QThenP,
    PThenQ,
}

#[derive(Clone, Debug)]
pub struct OptResult {
    pub p_star: ProbVec,
    pub q_star: ProbVec,
    /// `D(p*‖q*)`.
    pub divergence: f64,
    /// `−n·D(p*‖q*)`.
    pub log_bound: LogProb,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `D(p‖q)` over `p ∈ A`, `q ∈ B`.
pub fn min_kl_between_regions(
    a: &HalfspaceRegion,
    b: InnerRegion<'_>,
    n: u64,
    tol: f64,
) -> Result<OptResult> {
    min_kl_with_order(a, b, n, tol, SweepOrder::QThenP)
}

/// Same, with an explicit half-step order (exposed for invariance checks).
pub fn min_kl_with_order(
    a: &HalfspaceRegion,
    b: InnerRegion<'_>,
    n: u64,
    tol: f64,
    order: SweepOrder,
) -> Result<OptResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if !a.is_nonempty_on_simplex() {
        return Err(Error::EmptyRegion(format!(
            "outer region {:?} misses the simplex",
            a
        )));
    }
    let k = a.k();
    check_inner_arity(&b, k)?;

    // Overlapping regions: the bound is trivially 1.
    if let Some(witness) = overlap_witness(a, &b) {
        let w = ProbVec::new(witness)?;
        return Ok(OptResult {
            p_star: w.clone(),
            q_star: w,
            divergence: 0.0,
            log_bound: LogProb::ONE,
            iterations: 0,
            converged: true,
        });
    }

    // Start q at the barycenter of B's candidate description so the first
    // divergence is finite, and p at the projection of q onto A.
    let mut q = inner_barycenter(&b)?;
    let mut bloch_state = match b {
        InnerRegion::Bloch(_) => Some([0.0f64; 3]),
        _ => None,
    };
    let mut p = project_p_onto(a, &q)?;
    let mut d_prev = kl_slices(&p, &q);
    let mut iterations = 0usize;
    let mut converged = false;
    let mut last_pair: Option<(Vec<f64>, Vec<f64>, Option<[f64; 3]>)> = None;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        match order {
            SweepOrder::QThenP => {
                q = inner_step(&b, &p, &mut bloch_state, tol)?;
                p = project_p_onto(a, &q)?;
            }
            SweepOrder::PThenQ => {
                p = project_p_onto(a, &q)?;
                q = inner_step(&b, &p, &mut bloch_state, tol)?;
            }
        }
        let mut d = kl_slices(&p, &q);
        // Coordinate descent creeps along flat valleys (parallel cuts
        // force p and q to slide together); extrapolating the pair along
        // its last joint displacement jumps the valley.  Both cut
        // boundaries are affine, so the line stays feasible until a
        // coordinate leaves the simplex or the Bloch ball.
        if let Some((pl, ql, vl)) = &last_pair {
            let dir_p: Vec<f64> = p.iter().zip(pl).map(|(x, y)| x - y).collect();
            let dir_q: Vec<f64> = q.iter().zip(ql).map(|(x, y)| x - y).collect();
            let dir_v = match (&bloch_state, vl) {
                (Some(v), Some(w)) => Some([v[0] - w[0], v[1] - w[1], v[2] - w[2]]),
                _ => None,
            };
            // Joint point at parameter θ along the last displacement, or
            // None when it leaves the feasible sets.
            let at = |theta: f64| -> Option<(Vec<f64>, Vec<f64>, Option<[f64; 3]>, f64)> {
                let cp: Vec<f64> = p.iter().zip(&dir_p).map(|(x, dx)| x + theta * dx).collect();
                if cp.iter().any(|&x| x < 0.0) {
                    return None;
                }
                let tp: f64 = cp.iter().sum();
                let cp: Vec<f64> = cp.iter().map(|x| x / tp).collect();
                if a.dot(&cp) > a.offset() + MEMBERSHIP_TOL {
                    return None;
                }
                let (cq, cv) = match b {
                    InnerRegion::Singleton(_) => return None,
                    InnerRegion::Halfspace(h) => {
                        let cq: Vec<f64> =
                            q.iter().zip(&dir_q).map(|(x, dx)| x + theta * dx).collect();
                        if cq.iter().any(|&x| x < 0.0) {
                            return None;
                        }
                        let tq: f64 = cq.iter().sum();
                        let cq: Vec<f64> = cq.iter().map(|x| x / tq).collect();
                        if h.dot(&cq) > h.offset() + MEMBERSHIP_TOL {
                            return None;
                        }
                        (cq, None)
                    }
                    InnerRegion::Bloch(img) => {
                        let (v, dv) = match (&bloch_state, &dir_v) {
                            (Some(v), Some(dv)) => (*v, *dv),
                            _ => return None,
                        };
                        let cv = [
                            v[0] + theta * dv[0],
                            v[1] + theta * dv[1],
                            v[2] + theta * dv[2],
                        ];
                        if cv[0] * cv[0] + cv[1] * cv[1] + cv[2] * cv[2] > 1.0 {
                            return None;
                        }
                        match img.probabilities(cv) {
                            Ok(pq) => (pq.as_slice().to_vec(), Some(cv)),
                            Err(_) => return None,
                        }
                    }
                };
                let dc = kl_slices(&cp, &cq);
                Some((cp, cq, cv, dc))
            };
            // Bracket by doubling while improving; if θ = 1 already fails,
            // the valley curves within the step, so golden-section (0, 1].
            let mut best: Option<(Vec<f64>, Vec<f64>, Option<[f64; 3]>, f64)> = None;
            let mut theta = 1.0f64;
            for _ in 0..60 {
                match at(theta) {
                    Some(cand) if cand.3 < best.as_ref().map_or(d, |b| b.3) => {
                        best = Some(cand);
                        theta *= 2.0;
                    }
                    _ => break,
                }
            }
            if best.is_none() {
                let phi = (5f64.sqrt() - 1.0) / 2.0;
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                let eval = |t: f64| at(t).map_or(f64::INFINITY, |c| c.3);
                let mut x1 = hi - phi * (hi - lo);
                let mut x2 = lo + phi * (hi - lo);
                let (mut f1, mut f2) = (eval(x1), eval(x2));
                for _ in 0..30 {
                    if f1 <= f2 {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - phi * (hi - lo);
                        f1 = eval(x1);
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + phi * (hi - lo);
                        f2 = eval(x2);
                    }
                }
                let xb = if f1 <= f2 { x1 } else { x2 };
                if let Some(cand) = at(xb) {
                    if cand.3 < d {
                        best = Some(cand);
                    }
                }
            }
            if let Some((cp, cq, cv, dc)) = best {
                p = cp;
                q = cq;
                if let Some(cv) = cv {
                    bloch_state = Some(cv);
                }
                d = dc;
            }
        }
        last_pair = Some((p.clone(), q.clone(), bloch_state));
        let change = (d_prev - d).abs();
        d_prev = d;
        // Stop well below the requested tolerance: the remaining optimality
        // gap of coordinate descent is a multiple of the last step.
        if change < tol / 64.0 + 4e-16 * d.abs() {
            converged = true;
            break;
        }
    }

    let p_star = normalized_probvec(&p)?;
    let q_star = normalized_probvec(&q)?;
    let divergence = kl_divergence(&p_star, &q_star).max(0.0);
    Ok(OptResult {
        p_star,
        q_star,
        divergence,
        log_bound: LogProb::from_ln(-(n as f64) * divergence),
        iterations,
        converged,
    })
}

/// Exhaustive barycentric grid search, staged through zoom levels so the
/// final effective resolution per axis reaches `resolution`.  Test oracle
/// only: it shares nothing with the alternating path except the divergence
/// definition.
pub fn grid_oracle(
    a: &HalfspaceRegion,
    b: InnerRegion<'_>,
    n: u64,
    resolution: u32,
) -> Result<OptResult> {
    let k = a.k();
    if k > 3 {
        return Err(Error::InvalidArgument(
            "grid oracle supports k ≤ 3 only".into(),
        ));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be ≥ 1".into()));
    }
    check_inner_arity(&b, k)?;
    if !a.is_nonempty_on_simplex() {
        return Err(Error::EmptyRegion("outer region misses the simplex".into()));
    }

    const BASE_RES: u32 = 48;
    const WINDOW_CELLS: f64 = 4.0;
    const WINDOW_POINTS: u32 = 48;

    let base = resolution.min(BASE_RES);
    let mut p_cands = barycentric_grid(k, base);
    p_cands.extend(a.vertices_on_simplex());
    p_cands.retain(|p| a.dot(p) <= a.offset() + MEMBERSHIP_TOL);
    let mut q_cands = inner_grid_base(&b, base)?;

    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    scan_pairs(&p_cands, &q_cands, &mut best);

    // Zoom stages: re-grid a window around the incumbent pair.  Along a
    // flat valley the window minimum lands on the window edge; in that
    // case re-scan at the same scale (the window "walks") instead of
    // shrinking past the optimum.
    let mut eff = base as f64;
    let mut stages = 0;
    while eff < 2.0 * resolution as f64 && stages < 200 {
        stages += 1;
        let (d_before, bp, bq) = best
            .clone()
            .ok_or_else(|| Error::EmptyRegion("no feasible grid pair".into()))?;
        let half = WINDOW_CELLS / eff;
        p_cands = window_grid(k, &bp, half, WINDOW_POINTS);
        p_cands.retain(|p| a.dot(p) <= a.offset() + MEMBERSHIP_TOL);
        p_cands.extend(a.vertices_on_simplex());
        q_cands = inner_grid_window(&b, &bq, half, WINDOW_POINTS)?;
        scan_pairs(&p_cands, &q_cands, &mut best);
        let (d_after, np, nq) = best.clone().unwrap();
        let moved = euclid(&bp, &np).max(euclid(&bq, &nq));
        let walking = d_before - d_after > 1e-12 * (1.0 + d_before.abs()) && moved > 0.5 * half;
        if !walking {
            eff *= WINDOW_POINTS as f64 / (2.0 * WINDOW_CELLS);
        }
    }

    let (d, bp, bq) = best.ok_or_else(|| Error::EmptyRegion("no feasible grid pair".into()))?;
    let p_star = normalized_probvec(&bp)?;
    let q_star = normalized_probvec(&bq)?;
    Ok(OptResult {
        p_star,
        q_star,
        divergence: d,
        log_bound: LogProb::from_ln(-(n as f64) * d),
        iterations: 0,
        converged: true,
    })
}

fn check_inner_arity(b: &InnerRegion<'_>, k: usize) -> Result<()> {
    let bk = match b {
        InnerRegion::Halfspace(h) => h.k(),
        InnerRegion::Bloch(img) => img.k(),
        InnerRegion::Singleton(q) => q.k(),
    };
    if bk != k {
        return Err(Error::InvalidArgument(format!(
            "outer region has {k} outcomes but inner region has {bk}"
        )));
    }
    Ok(())
}

fn overlap_witness(a: &HalfspaceRegion, b: &InnerRegion<'_>) -> Option<Vec<f64>> {
    match b {
        InnerRegion::Singleton(q) => {
            if a.contains(q) {
                Some(q.as_slice().to_vec())
            } else {
                None
            }
        }
        InnerRegion::Halfspace(h) => h
            .vertices_on_simplex()
            .into_iter()
            .find(|v| a.dot(v) <= a.offset() + MEMBERSHIP_TOL),
        InnerRegion::Bloch(img) => {
            // Minimize the affine form u_A·q over the Bloch ball.
            let base: f64 = a
                .normal()
                .iter()
                .zip(img.affine_base())
                .map(|(u, b)| u * b)
                .sum();
            let mut grad = [0.0f64; 3];
            for (u, row) in a.normal().iter().zip(img.affine_map()) {
                for (g, m) in grad.iter_mut().zip(row) {
                    *g += u * m;
                }
            }
            let gnorm = (grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2]).sqrt();
            if base - gnorm <= a.offset() + MEMBERSHIP_TOL {
                // The minimizer itself may be deeper than needed; step back
                // to the touching point when the center is outside A.
                let v = if gnorm > 0.0 {
                    let t = ((base - a.offset()) / gnorm).clamp(0.0, 1.0);
                    [-grad[0] / gnorm * t, -grad[1] / gnorm * t, -grad[2] / gnorm * t]
                } else {
                    [0.0; 3]
                };
                img.probabilities(v).ok().map(|q| q.as_slice().to_vec())
            } else {
                None
            }
        }
    }
}

fn inner_barycenter(b: &InnerRegion<'_>) -> Result<Vec<f64>> {
    match b {
        InnerRegion::Singleton(q) => Ok(q.as_slice().to_vec()),
        InnerRegion::Bloch(img) => Ok(img.probabilities([0.0; 3])?.as_slice().to_vec()),
        InnerRegion::Halfspace(h) => {
            let verts = h.vertices_on_simplex();
            if verts.is_empty() {
                return Err(Error::EmptyRegion(format!(
                    "inner region {:?} misses the simplex",
                    h
                )));
            }
            let k = h.k();
            let mut mid = vec![0.0; k];
            for v in &verts {
                for (m, x) in mid.iter_mut().zip(v) {
                    *m += x / verts.len() as f64;
                }
            }
            Ok(mid)
        }
    }
}

fn inner_step(
    b: &InnerRegion<'_>,
    p: &[f64],
    bloch_state: &mut Option<[f64; 3]>,
    tol: f64,
) -> Result<Vec<f64>> {
    match b {
        InnerRegion::Singleton(q) => Ok(q.as_slice().to_vec()),
        InnerRegion::Halfspace(h) => q_step_halfspace(p, h),
        InnerRegion::Bloch(img) => {
            let v0 = bloch_state.unwrap_or([0.0; 3]);
            let (q, v) = q_step_bloch(p, img, v0, tol)?;
            *bloch_state = Some(v);
            Ok(q)
        }
    }
}

fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return f64::INFINITY;
        }
        total += pi * (pi / qi).ln();
    }
    total.max(0.0)
}

fn normalized_probvec(x: &[f64]) -> Result<ProbVec> {
    let total: f64 = x.iter().sum();
    ProbVec::new(x.iter().map(|&v| (v / total).max(0.0)).collect())
}

/// Minimize `D(·‖q)` over `{p : u·p ≤ c}`: exponential tilt
/// `p_i ∝ q_i e^{−λ u_i}` with `λ ≥ 0` found by bisection on `u·p = c`.
fn project_p_onto(a: &HalfspaceRegion, q: &[f64]) -> Result<Vec<f64>> {
    if a.dot(q) <= a.offset() + MEMBERSHIP_TOL {
        return Ok(q.to_vec());
    }
    let u = a.normal();
    let c = a.offset();
    let tilt = |lambda: f64| -> Vec<f64> {
        // Stabilize by shifting exponents to their maximum.
        let exps: Vec<f64> = q
            .iter()
            .zip(u)
            .map(|(&qi, &ui)| if qi > 0.0 { qi.ln() - lambda * ui } else { f64::NEG_INFINITY })
            .collect();
        let hi = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = exps.iter().map(|&e| (e - hi).exp()).collect();
        let z: f64 = raw.iter().sum();
        raw.iter().map(|&r| r / z).collect()
    };
    let value = |lambda: f64| a.dot(&tilt(lambda));

    let mut hi = 1.0f64;
    let mut doublings = 0;
    while value(hi) > c {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Internal(
                "halfspace unreachable within the support of q".into(),
            ));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if value(mid) > c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + hi) {
            break;
        }
    }
    Ok(tilt(hi))
}

/// Minimize `−Σ p_i ln q_i` over `{q : w·q ≤ c}` on the simplex.
fn q_step_halfspace(p: &[f64], h: &HalfspaceRegion) -> Result<Vec<f64>> {
    let w = h.normal();
    let c = h.offset();
    if h.dot(p) <= c + MEMBERSHIP_TOL {
        return Ok(p.to_vec());
    }
    let k = p.len();
    let supp: Vec<usize> = (0..k).filter(|&i| p[i] > 0.0).collect();
    let zeros: Vec<usize> = (0..k).filter(|&i| p[i] == 0.0).collect();

    // Constraint slack can be bought by parking mass on an unused outcome;
    // the cheapest one is the most negative coefficient.  The stationarity
    // system then closes in exact form.
    if let Some(&jstar) = zeros
        .iter()
        .min_by(|&&a, &&b| w[a].partial_cmp(&w[b]).unwrap())
    {
        let denom = c - w[jstar];
        if denom > 1e-300 && supp.iter().all(|&i| w[i] - w[jstar] > 1e-300) {
            let mut q = vec![0.0; k];
            let mut total = 0.0;
            for &i in &supp {
                q[i] = p[i] * denom / (w[i] - w[jstar]);
                total += q[i];
            }
            if total <= 1.0 + 1e-12 {
                q[jstar] = (1.0 - total).max(0.0);
                let z: f64 = q.iter().sum();
                for qi in &mut q {
                    *qi /= z;
                }
                return Ok(q);
            }
        }
    }

    // Full-support stationarity q_i = p_i/(μ + λ w_i) on supp(p): solve μ
    // from normalization (inner bisection), then λ from the active
    // constraint (outer bisection; w·q(λ) is nonincreasing in λ).
    let q_of = |lambda: f64| -> Vec<f64> {
        let mu_lo = supp
            .iter()
            .map(|&i| -lambda * w[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let total = |mu: f64| -> f64 { supp.iter().map(|&i| p[i] / (mu + lambda * w[i])).sum() };
        let mut lo = mu_lo + 1e-300f64.max(1e-16 * (1.0 + mu_lo.abs()));
        while total(lo) < 1.0 {
            // Bracket from above the pole until the sum crosses 1.
            lo = mu_lo + 0.5 * (lo - mu_lo);
            if lo - mu_lo < 1e-290 {
                break;
            }
        }
        let mut hi = (mu_lo + 1.0).max(1.0);
        while total(hi) > 1.0 {
            hi = mu_lo + 2.0 * (hi - mu_lo);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-16 * (1.0 + hi.abs()) {
                break;
            }
        }
        let mu = 0.5 * (lo + hi);
        let mut q = vec![0.0; p.len()];
        for &i in &supp {
            q[i] = p[i] / (mu + lambda * w[i]);
        }
        let z: f64 = q.iter().sum();
        for qi in &mut q {
            *qi /= z;
        }
        q
    };
    let constraint = |lambda: f64| -> f64 { h.dot(&q_of(lambda)) };

    let mut hi = 1.0f64;
    let mut doublings = 0;
    while constraint(hi) > c {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Internal(
                "inner halfspace unreachable within the support of p".into(),
            ));
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if constraint(mid) > c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + hi) {
            break;
        }
    }
    Ok(q_of(hi))
}

/// Minimize `−Σ p_i ln q_i(v)` over the Bloch ball by projected gradient
/// descent with Armijo backtracking; the map `v ↦ q` is affine, so the
/// objective is convex in `v`.
fn q_step_bloch(
    p: &[f64],
    img: &QubitMeasurementImage,
    v0: [f64; 3],
    tol: f64,
) -> Result<(Vec<f64>, [f64; 3])> {
    let base = img.affine_base();
    let map = img.affine_map();
    let probs = |v: &[f64; 3]| -> Vec<f64> {
        base.iter()
            .zip(map)
            .map(|(b, m)| b + m[0] * v[0] + m[1] * v[1] + m[2] * v[2])
            .collect()
    };
    let objective = |v: &[f64; 3]| -> f64 {
        let q = probs(v);
        let mut f = 0.0;
        for (&pi, &qi) in p.iter().zip(&q) {
            if pi <= 0.0 {
                continue;
            }
            if qi <= 0.0 {
                return f64::INFINITY;
            }
            f -= pi * qi.ln();
        }
        f
    };
    let project = |v: [f64; 3]| -> [f64; 3] {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm <= 1.0 {
            v
        } else {
            [v[0] / norm, v[1] / norm, v[2] / norm]
        }
    };

    let mut v = project(v0);
    let mut f = objective(&v);
    if !f.is_finite() {
        // Center of the ball always has interior probabilities.
        v = [0.0; 3];
        f = objective(&v);
    }
    let inner_tol = (tol * 1e-2).max(1e-15);
    let mut step = 1.0f64;
    for _ in 0..20_000 {
        let q = probs(&v);
        let mut grad = [0.0f64; 3];
        for ((&pi, &qi), m) in p.iter().zip(&q).zip(map) {
            if pi <= 0.0 {
                continue;
            }
            let s = -pi / qi.max(1e-300);
            grad[0] += s * m[0];
            grad[1] += s * m[1];
            grad[2] += s * m[2];
        }
        let mut improved = false;
        let mut eta = step;
        for _ in 0..60 {
            let cand = project([v[0] - eta * grad[0], v[1] - eta * grad[1], v[2] - eta * grad[2]]);
            let fc = objective(&cand);
            let move2 = (cand[0] - v[0]).powi(2) + (cand[1] - v[1]).powi(2) + (cand[2] - v[2]).powi(2);
            if fc <= f - 0.25 * move2 / eta.max(1e-300) {
                if f - fc < inner_tol && move2.sqrt() < 1e-12 {
                    return Ok((probs(&cand), cand));
                }
                v = cand;
                f = fc;
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            break;
        }
        step = (eta * 2.0).min(1e6);
    }
    Ok((probs(&v), v))
}

fn barycentric_grid(k: usize, res: u32) -> Vec<Vec<f64>> {
    let r = res as u64;
    let mut out = Vec::new();
    match k {
        2 => {
            for i in 0..=r {
                out.push(vec![i as f64 / r as f64, (r - i) as f64 / r as f64]);
            }
        }
        3 => {
            for i in 0..=r {
                for j in 0..=(r - i) {
                    out.push(vec![
                        i as f64 / r as f64,
                        j as f64 / r as f64,
                        (r - i - j) as f64 / r as f64,
                    ]);
                }
            }
        }
        _ => unreachable!("grid oracle is limited to k ≤ 3"),
    }
    out
}

/// Linear grid over a window of the simplex around `center`.
fn window_grid(k: usize, center: &[f64], half: f64, points: u32) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let step = 2.0 * half / points as f64;
    match k {
        2 => {
            for i in 0..=points {
                let x = (center[0] - half + i as f64 * step).clamp(0.0, 1.0);
                out.push(vec![x, 1.0 - x]);
            }
        }
        3 => {
            for i in 0..=points {
                let x = (center[0] - half + i as f64 * step).clamp(0.0, 1.0);
                for j in 0..=points {
                    let y = (center[1] - half + j as f64 * step).clamp(0.0, 1.0);
                    let z = 1.0 - x - y;
                    if z >= -1e-15 {
                        out.push(vec![x, y, z.max(0.0)]);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

fn inner_grid_base(b: &InnerRegion<'_>, res: u32) -> Result<Vec<Vec<f64>>> {
    match b {
        InnerRegion::Singleton(q) => Ok(vec![q.as_slice().to_vec()]),
        InnerRegion::Halfspace(h) => {
            let mut pts = barycentric_grid(h.k(), res);
            pts.extend(h.vertices_on_simplex());
            pts.retain(|q| h.dot(q) <= h.offset() + MEMBERSHIP_TOL);
            Ok(pts)
        }
        InnerRegion::Bloch(img) => {
            let mut pts = Vec::new();
            let r = res as i64;
            for i in -r..=r {
                let x = i as f64 / r as f64;
                for j in -r..=r {
                    let z = j as f64 / r as f64;
                    if x * x + z * z <= 1.0 {
                        pts.push(img.probabilities([x, 0.0, z])?.as_slice().to_vec());
                    }
                }
            }
            Ok(pts)
        }
    }
}

fn inner_grid_window(
    b: &InnerRegion<'_>,
    center: &[f64],
    half: f64,
    points: u32,
) -> Result<Vec<Vec<f64>>> {
    match b {
        InnerRegion::Singleton(q) => Ok(vec![q.as_slice().to_vec()]),
        InnerRegion::Halfspace(h) => {
            let mut pts = window_grid(h.k(), center, half, points);
            pts.extend(h.vertices_on_simplex());
            pts.retain(|q| h.dot(q) <= h.offset() + MEMBERSHIP_TOL);
            Ok(pts)
        }
        InnerRegion::Bloch(img) => {
            let c = ProbVec::new(center.to_vec())
                .ok()
                .and_then(|pv| img.preimage(&pv))
                .unwrap_or([0.0; 3]);
            // The window width lives in probability units; divide by the
            // smallest per-axis sensitivity of the affine map so the Bloch
            // window moves every outcome probability by at least a
            // comparable amount.  Isotropic on purpose: the optimum often
            // rides the disk boundary, and a flat window cannot follow the
            // arc.
            let sens = |axis: usize| -> f64 {
                img.affine_map()
                    .iter()
                    .map(|row| row[axis] * row[axis])
                    .sum::<f64>()
                    .sqrt()
                    .max(1e-9)
            };
            let h = (half / sens(0).min(sens(2))).min(2.0);
            let (hx, hz) = (h, h);
            let mut pts = Vec::new();
            for i in 0..=points {
                let x = c[0] - hx + 2.0 * hx * i as f64 / points as f64;
                for j in 0..=points {
                    let z = c[2] - hz + 2.0 * hz * j as f64 / points as f64;
                    if x * x + z * z <= 1.0 {
                        pts.push(img.probabilities([x, 0.0, z])?.as_slice().to_vec());
                    }
                }
            }
            if pts.is_empty() {
                pts.push(img.probabilities([0.0; 3])?.as_slice().to_vec());
            }
            Ok(pts)
        }
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn scan_pairs(ps: &[Vec<f64>], qs: &[Vec<f64>], best: &mut Option<(f64, Vec<f64>, Vec<f64>)>) {
    for p in ps {
        for q in qs {
            let d = kl_slices(p, q);
            if best.as_ref().map_or(true, |(bd, _, _)| d < *bd) {
                *best = Some((d, p.clone(), q.clone()));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::toy_measurement_image;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pv(entries: &[f64]) -> ProbVec {
        ProbVec::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn overlapping_regions_give_unit_bound() {
        let a = HalfspaceRegion::at_least(vec![1.0, 0.0, 0.0], 0.2).unwrap();
        let b = HalfspaceRegion::less_equal(vec![1.0, -1.0, 0.0], 0.0).unwrap();
        let res = min_kl_between_regions(&a, InnerRegion::Halfspace(&b), 100, 1e-10).unwrap();
        assert_eq!(res.divergence, 0.0);
        assert!((res.log_bound.linear() - 1.0).abs() < 1e-15);
        assert!(res.converged);
    }

    #[test]
    fn binary_singleton_closed_form() {
        // A = {p₁ ≥ 0.9}, q = (½,½):  D((0.9,0.1)‖(½,½)) = 0.368064.
        let a = HalfspaceRegion::at_least(vec![1.0, 0.0], 0.9).unwrap();
        let q = pv(&[0.5, 0.5]);
        let res = min_kl_between_regions(&a, InnerRegion::Singleton(&q), 100, 1e-12).unwrap();
        let want = 0.9 * (1.8f64).ln() + 0.1 * (0.2f64).ln();
        assert!((res.divergence - want).abs() < 1e-9);
        assert!((res.divergence - 0.368064).abs() < 1e-6);
        assert!((res.log_bound.ln() + 36.8064).abs() < 1e-3);
        assert!((res.p_star.get(0) - 0.9).abs() < 1e-9);
        assert!(res.converged);
    }

    #[test]
    fn q_step_parks_mass_outside_support() {
        // p = (0.9, 0.1, 0), B = {q₁ ≤ 5 q₃}: optimum q = (0.75, 0.1, 0.15).
        let b = HalfspaceRegion::less_equal(vec![1.0, 0.0, -5.0], 0.0).unwrap();
        let q = q_step_halfspace(&[0.9, 0.1, 0.0], &b).unwrap();
        assert!((q[0] - 0.75).abs() < 1e-12);
        assert!((q[1] - 0.10).abs() < 1e-12);
        assert!((q[2] - 0.15).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_grid_oracle_on_random_halfspace_pairs() {
        let mut rng = StdRng::seed_from_u64(42);
        let mut tested = 0;
        while tested < 8 {
            let b_norm = vec![1.0, -(rng.random::<f64>() * 3.0), -(rng.random::<f64>() * 3.0)];
            let b = HalfspaceRegion::less_equal(b_norm, 0.0).unwrap();
            let a_gap: f64 = 0.02 + rng.random::<f64>() * 0.2;
            let a = HalfspaceRegion::at_least(
                vec![1.0, -(rng.random::<f64>() * 2.0), 0.0],
                a_gap,
            )
            .unwrap();
            if !a.is_nonempty_on_simplex() {
                continue;
            }
            let fast =
                min_kl_between_regions(&a, InnerRegion::Halfspace(&b), 50, 1e-12).unwrap();
            let slow = grid_oracle(&a, InnerRegion::Halfspace(&b), 50, 800).unwrap();
            assert!(
                (fast.divergence - slow.divergence).abs() < 2e-4,
                "D mismatch: {} vs {}",
                fast.divergence,
                slow.divergence
            );
            // The oracle can only overshoot the true minimum.
            assert!(fast.divergence <= slow.divergence + 1e-9);
            tested += 1;
        }
    }

    #[test]
    fn bloch_inner_region_matches_oracle() {
        let img = toy_measurement_image(0.01).unwrap();
        // Failure-style region p₁ − γp₂ ≥ m(γ) + Δ at γ = 1.662.
        let a = HalfspaceRegion::at_least(vec![1.0, -1.662, 0.0], 0.0287298 + 0.01).unwrap();
        let fast = min_kl_between_regions(&a, InnerRegion::Bloch(&img), 100, 1e-12).unwrap();
        let slow = grid_oracle(&a, InnerRegion::Bloch(&img), 100, 1500).unwrap();
        assert!(
            (fast.divergence - slow.divergence).abs() < 1e-4,
            "{} vs {}",
            fast.divergence,
            slow.divergence
        );
        assert!(fast.converged);
        assert!(img.contains(&fast.q_star, 1e-6));
    }

    #[test]
    fn order_of_half_steps_is_immaterial() {
        let b = HalfspaceRegion::less_equal(vec![1.0, -1.25, 0.0], 0.001).unwrap();
        let a = HalfspaceRegion::at_least(vec![1.0, -1.25, 0.0], 0.05).unwrap();
        let tol = 1e-12;
        let qp = min_kl_with_order(&a, InnerRegion::Halfspace(&b), 10, tol, SweepOrder::QThenP)
            .unwrap();
        let pq = min_kl_with_order(&a, InnerRegion::Halfspace(&b), 10, tol, SweepOrder::PThenQ)
            .unwrap();
        assert!((qp.divergence - pq.divergence).abs() <= 2.0 * tol + 1e-15);
    }

    #[test]
    fn bound_monotone_in_n_for_fixed_regions() {
        let b = HalfspaceRegion::less_equal(vec![1.0, -1.25, 0.0], 0.0).unwrap();
        let a = HalfspaceRegion::at_least(vec![1.0, -1.25, 0.0], 0.03).unwrap();
        let mut last = f64::INFINITY;
        for n in [10u64, 100, 1000, 10_000] {
            let res = min_kl_between_regions(&a, InnerRegion::Halfspace(&b), n, 1e-12).unwrap();
            assert!(res.log_bound.ln() <= last + 1e-12);
            last = res.log_bound.ln();
        }
    }

    #[test]
    fn kkt_residual_small_at_interior_optimum() {
        // Disjoint (max of p₁ over B is 0.3/1.3 < 0.5), optimum interior:
        // the tilt of a full-support q along (1,0,0) keeps all coordinates.
        let b = HalfspaceRegion::less_equal(vec![1.0, -0.3, -0.3], 0.0).unwrap();
        let a = HalfspaceRegion::at_least(vec![1.0, 0.0, 0.0], 0.5).unwrap();
        let res = min_kl_between_regions(&a, InnerRegion::Halfspace(&b), 10, 1e-13).unwrap();
        let p = res.p_star.as_slice();
        let q = res.q_star.as_slice();
        assert!(p.iter().all(|&x| x > 1e-9), "optimum not interior: {:?}", p);
        // Stationarity in p: ln(p/q) + 1 + λ u + μ 1 = 0 for some λ ≤ 0
        // (A is a ≥-cut stored with flipped normal), μ free.  Solve the
        // 2-parameter least-squares and check the residual.
        let g: Vec<f64> = p
            .iter()
            .zip(q)
            .map(|(&pi, &qi)| (pi / qi).ln() + 1.0)
            .collect();
        let u = a.normal();
        // Least squares for g + λu + μ1 ≈ 0.
        let k = g.len() as f64;
        let su: f64 = u.iter().sum();
        let sg: f64 = g.iter().sum();
        let suu: f64 = u.iter().map(|x| x * x).sum();
        let sug: f64 = u.iter().zip(&g).map(|(a, b)| a * b).sum();
        let det = suu * k - su * su;
        let lambda = -(sug * k - su * sg) / det;
        let mu = -(sg + lambda * su) / k;
        let resid: f64 = g
            .iter()
            .zip(u)
            .map(|(&gi, &ui)| (gi + lambda * ui + mu).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-6, "KKT residual {resid}");
    }

    #[test]
    fn grid_oracle_monotone_under_refinement() {
        let b = HalfspaceRegion::less_equal(vec![1.0, -1.25, 0.0], 0.0).unwrap();
        let a = HalfspaceRegion::at_least(vec![1.0, -1.0, 0.0], 0.05).unwrap();
        let mut last = f64::INFINITY;
        for res in [1u32, 2, 4, 8, 16, 32] {
            let d = grid_oracle(&a, InnerRegion::Halfspace(&b), 10, res)
                .unwrap()
                .divergence;
            assert!(d <= last + 1e-15, "resolution {res} worsened the oracle");
            last = d;
        }
    }

    #[test]
    fn degenerate_resolution_uses_vertices_only() {
        let b = HalfspaceRegion::less_equal(vec![1.0, -1.0, 0.0], 0.0).unwrap();
        let a = HalfspaceRegion::at_least(vec![1.0, 0.0, 0.0], 0.5).unwrap();
        let res = grid_oracle(&a, InnerRegion::Halfspace(&b), 10, 1).unwrap();
        assert!(res.divergence.is_finite());
    }

    #[test]
    fn infeasible_outer_region_rejected() {
        let a = HalfspaceRegion::at_least(vec![1.0, 0.0, 0.0], 1.5).unwrap();
        let b = HalfspaceRegion::less_equal(vec![1.0, -1.0, 0.0], 0.0).unwrap();
        assert!(min_kl_between_regions(&a, InnerRegion::Halfspace(&b), 10, 1e-10).is_err());
    }
}
