//! Small dense complex Hermitian matrices for operator-level checks.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// A dense Hermitian operator with real spectrum.
///
/// Construction symmetrizes away rounding residue but rejects matrices
/// whose Hermiticity defect exceeds `1e-12` relative to the entry scale.
#[derive(Clone, Debug)]
pub struct HermitianOp {
    mat: DMatrix<C64>,
}

impl HermitianOp {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidArgument("operator must be square".into()));
        }
        let scale = mat
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let adj = mat.adjoint();
        let defect = (&mat - &adj).iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        if defect > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian: defect {defect:e} at scale {scale:e}"
            )));
        }
        Ok(Self { mat: (mat + adj) * C64::new(0.5, 0.0) })
    }

    pub fn from_real(mat: DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(mat.map(|x| C64::new(x, 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }

    /// Rank-one projector `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn projector(v: &[C64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::InvalidArgument("zero vector has no projector".into()));
        }
        let dim = v.len();
        let mat = DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj() / norm2);
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Real expectation `Tr[self · rho]` for Hermitian `rho`.
    pub fn expectation(&self, rho: &HermitianOp) -> f64 {
        (&self.mat * &rho.mat).trace().re
    }

    /// Eigenvalues in ascending order (real, by Hermiticity).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.mat.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { mat: &self.mat * C64::new(factor, 0.0) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { mat: &self.mat + &other.mat }
    }

    pub fn add_scaled_in_place(&mut self, other: &Self, factor: f64) {
        self.mat += &other.mat * C64::new(factor, 0.0);
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { mat: &self.mat - &other.mat }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { mat: self.mat.kronecker(&other.mat) }
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    /// Frobenius norm of `AB − BA`; zero iff the operators commute.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        (&self.mat * &other.mat - &other.mat * &self.mat).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_y() -> HermitianOp {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.0, -1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        HermitianOp::from_matrix(m).unwrap()
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // σ_y has eigenvalues ±1; a genuinely complex case for the solver.
        let y = pauli_y();
        let vals = y.eigenvalues();
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);

        // Shifted and scaled: 2I + 3σ_y has eigenvalues {−1, 5}.
        let m = HermitianOp::identity(2).scaled(2.0).add(&y.scaled(3.0));
        let vals = m.eigenvalues();
        assert!((vals[0] + 1.0).abs() < 1e-10);
        assert!((vals[1] - 5.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(HermitianOp::from_matrix(m).is_err());
    }

    #[test]
    fn projector_is_idempotent() {
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let p = HermitianOp::projector(&v).unwrap();
        assert!((p.trace() - 1.0).abs() < 1e-12);
        let p2 = HermitianOp::from_matrix(p.matrix() * p.matrix()).unwrap();
        assert!(p.frobenius_distance(&p2) < 1e-12);
    }

    #[test]
    fn kron_dims_and_trace() {
        let y = pauli_y();
        let i2 = HermitianOp::identity(2);
        let k = y.kron(&i2);
        assert_eq!(k.dim(), 4);
        assert!(k.trace().abs() < 1e-12);
        let ii = i2.kron(&i2);
        assert!((ii.trace() - 4.0).abs() < 1e-12);
    }
}
