//! Probability-simplex geometry: points, KL divergence, halfspace regions
//! and their `O(1/n)` expansions, and qubit measurement images.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::repcore::HermitianOp;

/// Membership tolerance for "point lies in region" checks; boundary optima
/// coming back from the optimizer sit exactly on the cut.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// A point of the probability simplex with `k ≥ 2` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbVec {
    entries: Vec<f64>,
}

impl ProbVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InvalidArgument("need at least two outcomes".into()));
        }
        if entries.iter().any(|&p| !(p >= -1e-13) || !p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "entries must be nonnegative, got {:?}",
                entries
            )));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "entries must sum to 1 within 1e-12, got {total}"
            )));
        }
        let entries = entries.iter().map(|&p| p.max(0.0)).collect();
        Ok(Self { entries })
    }

    pub fn uniform(k: usize) -> Self {
        Self { entries: vec![1.0 / k as f64; k] }
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub fn euclidean_distance(&self, other: &ProbVec) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// `Σ p_i ln(p_i/q_i)` with `0·ln 0 = 0`; `+∞` when `supp(p) ⊄ supp(q)`.
pub fn kl_divergence(p: &ProbVec, q: &ProbVec) -> f64 {
    assert_eq!(p.k(), q.k(), "KL divergence needs equal lengths");
    let mut total = 0.0;
    for (&pi, &qi) in p.as_slice().iter().zip(q.as_slice()) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return f64::INFINITY;
        }
        total += pi * (pi / qi).ln();
    }
    total.max(0.0)
}

/// A convex subset of the simplex cut by one affine inequality
/// `{p ∈ P : u·p ≤ c}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceRegion {
    normal: Vec<f64>,
    offset: f64,
}

impl HalfspaceRegion {
    /// Region `{p : u·p ≤ c}`.
    pub fn less_equal(normal: Vec<f64>, offset: f64) -> Result<Self> {
        if normal.len() < 2 {
            return Err(Error::InvalidArgument("normal needs at least 2 entries".into()));
        }
        if normal.iter().any(|x| !x.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidArgument("normal and offset must be finite".into()));
        }
        Ok(Self { normal, offset })
    }

    /// Region `{p : u·p ≥ c}`, stored as `{p : (−u)·p ≤ −c}`.
    pub fn at_least(normal: Vec<f64>, offset: f64) -> Result<Self> {
        Self::less_equal(normal.iter().map(|x| -x).collect(), -offset)
    }

    /// Normalized cut `{p : u·p ≤ 0}` with `u = (1, −b_2, …, −b_k)`,
    /// `b_j ≥ 0`, built from an arbitrary affine cut `{p : u·p ≤ c}` by
    /// absorbing the offset with `Σ p_i = 1` and rescaling.
    ///
    /// This is the normal form under which the complement on the simplex
    /// contains only the first vertex, so the offset-expansion step below
    /// applies.
    pub fn cut_toward_first_vertex(normal: &[f64], offset: f64) -> Result<Self> {
        if normal.len() < 2 {
            return Err(Error::InvalidArgument("normal needs at least 2 entries".into()));
        }
        let lead = normal[0] - offset;
        if lead <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cut does not exclude the first vertex: u_1 − c = {lead}"
            )));
        }
        let mut homog: Vec<f64> = normal.iter().map(|&u| (u - offset) / lead).collect();
        homog[0] = 1.0;
        for (j, &u) in homog.iter().enumerate().skip(1) {
            if u > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "coefficient b_{} = {} is negative after normalization",
                    j + 1,
                    -u
                )));
            }
        }
        Self::less_equal(homog, 0.0)
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn k(&self) -> usize {
        self.normal.len()
    }

    pub fn dot(&self, p: &[f64]) -> f64 {
        self.normal.iter().zip(p).map(|(u, x)| u * x).sum()
    }

    pub fn contains(&self, p: &ProbVec) -> bool {
        self.dot(p.as_slice()) <= self.offset + MEMBERSHIP_TOL
    }

    /// Whether the region meets the simplex at all: the linear form is
    /// minimized at a vertex.
    pub fn is_nonempty_on_simplex(&self) -> bool {
        let min = self.normal.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        min <= self.offset + MEMBERSHIP_TOL
    }

    /// Whether the region is the normalized single-vertex exclusion cut:
    /// `c = 0`, `u = (1, −b_2, …, −b_k)` with every `b_j ≥ 0`.
    pub fn is_vertex_exclusion_form(&self) -> bool {
        self.offset == 0.0
            && (self.normal[0] - 1.0).abs() <= 1e-12
            && self.normal.iter().skip(1).all(|&u| u <= 1e-12)
    }

    /// Vertices of the region intersected with the simplex: the simplex
    /// vertices it contains plus the cut's intersections with simplex
    /// edges.  For a single halfspace this closed form is exhaustive.
    pub fn vertices_on_simplex(&self) -> Vec<Vec<f64>> {
        let k = self.k();
        let mut verts = Vec::new();
        for j in 0..k {
            if self.normal[j] <= self.offset + MEMBERSHIP_TOL {
                let mut v = vec![0.0; k];
                v[j] = 1.0;
                verts.push(v);
            }
        }
        for a in 0..k {
            for b in (a + 1)..k {
                let (ua, ub) = (self.normal[a], self.normal[b]);
                if (ua - ub).abs() < 1e-15 {
                    continue;
                }
                let t = (self.offset - ub) / (ua - ub);
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    let mut v = vec![0.0; k];
                    v[a] = t;
                    v[b] = 1.0 - t;
                    verts.push(v);
                }
            }
        }
        verts
    }
}

/// Expand a normalized vertex-exclusion cut outward by the worst-case
/// shift of one empirical-frequency step: the new offset is
/// `√2·‖u − (v·u)v‖ / n` with `v = (1,…,1)/√k`.
pub fn expand_region(region: &HalfspaceRegion, n: u64) -> Result<HalfspaceRegion> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !region.is_vertex_exclusion_form() {
        return Err(Error::InvalidArgument(
            "expansion needs the normalized vertex-exclusion form (offset 0, normal (1, −b_2, …))"
                .into(),
        ));
    }
    let u = region.normal();
    let k = u.len() as f64;
    let mean: f64 = u.iter().sum::<f64>() / k;
    let proj_norm: f64 = u.iter().map(|&ui| (ui - mean) * (ui - mean)).sum::<f64>().sqrt();
    let offset = std::f64::consts::SQRT_2 * proj_norm / n as f64;
    HalfspaceRegion::less_equal(u.to_vec(), offset)
}

/// Neighbor-shift property: if `p` lies in the cut region and
/// `‖p − q‖ ≤ √2/n`, then `q` lies in the expanded region.  Returns the
/// truth of that implication (vacuously true when the premise fails).
pub fn neighbor_shift_lemma_check(
    p: &ProbVec,
    q: &ProbVec,
    region: &HalfspaceRegion,
    n: u64,
) -> Result<bool> {
    let premise = region.contains(p)
        && p.euclidean_distance(q) <= std::f64::consts::SQRT_2 / n as f64 + 1e-15;
    if !premise {
        return Ok(true);
    }
    let expanded = expand_region(region, n)?;
    Ok(expanded.contains(q))
}

/// The outcome-probability image of a qubit POVM: an affine map from the
/// Bloch ball into the simplex.
#[derive(Clone, Debug)]
pub struct QubitMeasurementImage {
    effects: Vec<HermitianOp>,
    /// `p_i = base[i] + bloch[i]·v` for a Bloch vector `v`.
    base: Vec<f64>,
    bloch: Vec<[f64; 3]>,
}

impl QubitMeasurementImage {
    pub fn from_effects(effects: Vec<HermitianOp>) -> Result<Self> {
        if effects.len() < 2 {
            return Err(Error::InvalidArgument("need at least two effects".into()));
        }
        let mut sum = HermitianOp::zeros(2);
        for e in &effects {
            if e.dim() != 2 {
                return Err(Error::InvalidArgument("effects must be 2×2".into()));
            }
            if !e.is_psd(1e-12) {
                return Err(Error::InvalidArgument("effects must be positive".into()));
            }
            sum.add_scaled_in_place(e, 1.0);
        }
        if sum.frobenius_distance(&HermitianOp::identity(2)) > 1e-12 {
            return Err(Error::InvalidArgument("effects must sum to the identity".into()));
        }
        let (sx, sy, sz) = pauli();
        let base = effects.iter().map(|e| 0.5 * e.trace()).collect();
        let bloch = effects
            .iter()
            .map(|e| {
                [
                    0.5 * e.expectation(&sx),
                    0.5 * e.expectation(&sy),
                    0.5 * e.expectation(&sz),
                ]
            })
            .collect();
        Ok(Self { effects, base, bloch })
    }

    pub fn k(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianOp] {
        &self.effects
    }

    /// Outcome distribution of the state with Bloch vector `v`, `‖v‖ ≤ 1`.
    pub fn probabilities(&self, v: [f64; 3]) -> Result<ProbVec> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "Bloch vector has norm {norm} > 1"
            )));
        }
        let entries = self
            .base
            .iter()
            .zip(&self.bloch)
            .map(|(b, m)| b + m[0] * v[0] + m[1] * v[1] + m[2] * v[2])
            .collect();
        ProbVec::new(entries)
    }

    pub fn affine_base(&self) -> &[f64] {
        &self.base
    }

    pub fn affine_map(&self) -> &[[f64; 3]] {
        &self.bloch
    }

    /// Whether `p` is realized by some state: least-squares for the Bloch
    /// preimage, then a ball and residual check.
    pub fn contains(&self, p: &ProbVec, tol: f64) -> bool {
        match self.preimage(p) {
            Some(v) => {
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if norm > 1.0 + tol {
                    return false;
                }
                match self.probabilities([
                    v[0] / norm.max(1.0),
                    v[1] / norm.max(1.0),
                    v[2] / norm.max(1.0),
                ]) {
                    Ok(q) => p.euclidean_distance(&q) <= tol.max(1e-12),
                    Err(_) => false,
                }
            }
            None => false,
        }
    }

    /// Minimal-norm solution of `bloch·v = p − base`.
    pub fn preimage(&self, p: &ProbVec) -> Option<[f64; 3]> {
        if p.k() != self.k() {
            return None;
        }
        let rows = self.k();
        let m = DMatrix::from_fn(rows, 3, |i, j| self.bloch[i][j]);
        let rhs = DVector::from_fn(rows, |i, _| p.get(i) - self.base[i]);
        let svd = m.svd(true, true);
        svd.solve(&rhs, 1e-12).ok().map(|v| [v[0], v[1], v[2]])
    }
}

fn pauli() -> (HermitianOp, HermitianOp, HermitianOp) {
    type C = Complex<f64>;
    let sx = DMatrix::from_row_slice(2, 2, &[C::new(0., 0.), C::new(1., 0.), C::new(1., 0.), C::new(0., 0.)]);
    let sy = DMatrix::from_row_slice(2, 2, &[C::new(0., 0.), C::new(0., -1.), C::new(0., 1.), C::new(0., 0.)]);
    let sz = DMatrix::from_row_slice(2, 2, &[C::new(1., 0.), C::new(0., 0.), C::new(0., 0.), C::new(-1., 0.)]);
    (
        HermitianOp::from_matrix(sx).unwrap(),
        HermitianOp::from_matrix(sy).unwrap(),
        HermitianOp::from_matrix(sz).unwrap(),
    )
}

/// The three-outcome image of the estimation toy measurement: a uniform
/// mix of the computational projective pair and a tilted pair, with the
/// two "0" outcomes merged.  Effects are
/// `{½|1⟩⟨1|, ½|φ₁⟩⟨φ₁|, ½(|0⟩⟨0| + |φ₀⟩⟨φ₀|)}` with
/// `|φ₁⟩ = √r|0⟩ − √(1−r)|1⟩` and `|φ₀⟩ = √(1−r)|0⟩ + √r|1⟩`.
pub fn toy_measurement_image(r: f64) -> Result<QubitMeasurementImage> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidArgument(format!("need 0 < r < 1, got {r}")));
    }
    type C = Complex<f64>;
    let ket0 = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
    let ket1 = [C::new(0.0, 0.0), C::new(1.0, 0.0)];
    let phi0 = [C::new((1.0 - r).sqrt(), 0.0), C::new(r.sqrt(), 0.0)];
    let phi1 = [C::new(r.sqrt(), 0.0), C::new(-(1.0 - r).sqrt(), 0.0)];
    let p1 = HermitianOp::projector(&ket1)?.scaled(0.5);
    let p2 = HermitianOp::projector(&phi1)?.scaled(0.5);
    let p3 = HermitianOp::projector(&ket0)?
        .add(&HermitianOp::projector(&phi0)?)
        .scaled(0.5);
    QubitMeasurementImage::from_effects(vec![p1, p2, p3])
}
