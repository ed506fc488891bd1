//! Dense complex linear algebra on tensor-product spaces.
//!
//! Index ordering is big-endian throughout: in `A ⊗ B` the first factor owns
//! the slowest-varying index, and in a [`SubsystemLayout`] factor 0 is the
//! most significant digit of a basis index.

mod hermitian;
mod layout;
mod subspace;

pub use hermitian::{eig_hermitian, fidelity, EigenDecomposition, HermitianOperator};
pub use layout::{conjugate_factor, partial_trace, permute_operator, permute_vector, SubsystemLayout};
pub use subspace::{support_projector, Subspace, INTERSECTION_TOL};

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::Cap;

pub type ComplexVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        ComplexMatrix(DMatrix::identity(dim, dim))
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::InvalidInput(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix(DMatrix::from_fn(rows, cols, f))
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &ComplexVector, v: &ComplexVector) -> Self {
        ComplexMatrix(u * v.adjoint())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn scale(&self, factor: f64) -> Self {
        ComplexMatrix(&self.0 * Complex64::new(factor, 0.0))
    }

    /// Largest entry modulus, `‖A‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0.iter().zip(other.0.iter()).fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        &self.0 * v
    }

    /// `⟨v|A|v⟩`.
    pub fn quadratic_form(&self, v: &ComplexVector) -> Complex64 {
        v.dotc(&(&self.0 * v))
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl From<DMatrix<Complex64>> for ComplexMatrix {
    fn from(m: DMatrix<Complex64>) -> Self {
        ComplexMatrix(m)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Kronecker product `a ⊗ b`; `a` owns the slowest-varying index.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix, cap: Cap) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let entries = rows as u128 * cols as u128;
    if entries > cap.0 as u128 {
        return Err(Error::CapExceeded { dim: rows.max(cols), entries, cap: cap.0 });
    }
    Ok(ComplexMatrix(a.0.kronecker(&b.0)))
}

/// Kronecker product of vectors, same ordering as [`kron`].
pub fn kron_vec(u: &ComplexVector, v: &ComplexVector) -> ComplexVector {
    u.kronecker(v)
}

/// Tensor product of a list of vectors, first one slowest.
pub fn kron_vecs<'a>(vectors: impl IntoIterator<Item = &'a ComplexVector>) -> ComplexVector {
    vectors.into_iter().fold(ComplexVector::from_element(1, ONE), |acc, v| kron_vec(&acc, v))
}

/// Computational basis vector `|k⟩` in dimension `dim`.
pub fn basis_vector(dim: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[k] = ONE;
    v
}
