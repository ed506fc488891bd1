use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};
use crate::tol::{HERM_TOL, PSD_TOL, ZERO_FLOOR};

/// A square complex matrix equal to its adjoint.
///
/// Inputs within `HERM_TOL · max(1, ‖A‖_max)` of Hermitian are accepted and
/// replaced by `(A + A†)/2`, so the stored matrix is exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::LayoutMismatch(format!(
                "Hermitian operator must be square, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidInput("operator entries must be finite".into()));
        }
        let residual = matrix.max_abs_diff(&matrix.adjoint());
        if residual > HERM_TOL * matrix.max_abs().max(1.0) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Used where the construction is Hermitian up to rounding.
    pub(crate) fn symmetrized(matrix: ComplexMatrix) -> Self {
        let m = matrix.into_matrix();
        let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        HermitianOperator { matrix: ComplexMatrix::from(sym) }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianOperator { matrix: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator { matrix: ComplexMatrix::identity(dim) }
    }

    /// `|v⟩⟨v|` (not normalized).
    pub fn projector_onto(v: &ComplexVector) -> Self {
        HermitianOperator { matrix: ComplexMatrix::outer(v, v) }
    }

    /// `Σ_j w_j |v_j⟩⟨v_j|`.
    pub fn weighted_sum(dim: usize, terms: impl IntoIterator<Item = (f64, ComplexVector)>) -> Self {
        let mut acc = DMatrix::zeros(dim, dim);
        for (w, v) in terms {
            acc += (&v * v.adjoint()) * Complex64::new(w, 0.0);
        }
        Self::symmetrized(acc.into())
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `⟨v|A|v⟩`, real for Hermitian `A`.
    pub fn expectation(&self, v: &ComplexVector) -> f64 {
        self.matrix.quadratic_form(v).re
    }

    pub fn scale(&self, factor: f64) -> Self {
        HermitianOperator { matrix: self.matrix.scale(factor) }
    }

    pub fn add(&self, other: &HermitianOperator) -> Self {
        HermitianOperator { matrix: &self.matrix + &other.matrix }
    }

    pub fn sub(&self, other: &HermitianOperator) -> Self {
        HermitianOperator { matrix: &self.matrix - &other.matrix }
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// `M A M†`.
    pub fn conjugate_by(&self, m: &ComplexMatrix) -> Self {
        Self::symmetrized(&(m * &self.matrix) * &m.adjoint())
    }

    pub fn eig(&self) -> EigenDecomposition {
        eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().values.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig().values.last().copied().unwrap_or(0.0)
    }

    /// Fails with `NotPositive` when an eigenvalue lies below `-PSD_TOL · max(1, λ_max)`.
    pub fn check_psd(&self) -> Result<EigenDecomposition> {
        let eig = self.eig();
        let lo = eig.values.first().copied().unwrap_or(0.0);
        let hi = eig.values.last().copied().unwrap_or(0.0);
        if lo < -PSD_TOL * hi.max(1.0) {
            return Err(Error::NotPositive { min_eigenvalue: lo });
        }
        Ok(eig)
    }

    /// Principal square root of a PSD operator; tiny negative eigenvalues are clipped.
    pub fn sqrt_psd(&self) -> Result<HermitianOperator> {
        let eig = self.check_psd()?;
        Ok(eig.map_values(|x| x.max(0.0).sqrt()))
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl EigenDecomposition {
    pub fn vector(&self, j: usize) -> ComplexVector {
        self.vectors.column(j).into_owned()
    }

    /// `Σ f(λ_j) |v_j⟩⟨v_j|`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, j| {
            self.vectors[(i, j)] * f(self.values[j])
        });
        HermitianOperator::symmetrized((scaled * self.vectors.adjoint()).into())
    }

    pub fn reconstruct(&self) -> HermitianOperator {
        self.map_values(|x| x)
    }
}

/// Spectral decomposition of a Hermitian operator, eigenvalues ascending.
pub fn eig_hermitian(op: &HermitianOperator) -> EigenDecomposition {
    let dim = op.dim();
    if dim == 0 {
        return EigenDecomposition { values: vec![], vectors: DMatrix::zeros(0, 0) };
    }
    let eig = SymmetricEigen::new(op.matrix().as_matrix().clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |i, j| eig.eigenvectors[(i, order[j])]);
    EigenDecomposition { values, vectors }
}

/// Square-root fidelity `F(ρ, σ) = Tr √(√ρ σ √ρ)`.
///
/// For pure `σ = |φ⟩⟨φ|` this gives `F² = ⟨φ|ρ|φ⟩`.
pub fn fidelity(rho: &HermitianOperator, sigma: &HermitianOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::LayoutMismatch(format!(
            "fidelity of operators of dimension {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    sigma.check_psd()?;
    let root = rho.sqrt_psd()?;
    let values = sigma.conjugate_by(root.matrix()).eig().values;
    // rounding noise of size ε would otherwise contribute √ε per null direction
    let floor = 1e-13 * values.last().copied().unwrap_or(0.0).max(ZERO_FLOOR);
    Ok(values.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum())
}
