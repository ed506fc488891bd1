use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector, HermitianOperator};
use crate::error::{Error, Result};
use crate::tol::ZERO_FLOOR;

/// Two subspaces share a direction when `1 − cos θ ≤ INTERSECTION_TOL` for a principal angle θ.
pub const INTERSECTION_TOL: f64 = 1e-7;

const ORTH_TOL: f64 = 1e-9;

/// A subspace given by an orthonormal basis (the columns of `basis`).
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<Complex64>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: DMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: DMatrix::identity(ambient_dim, ambient_dim) }
    }

    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<Complex64>) -> Result<Self> {
        let gram = basis.adjoint() * &basis;
        let residual =
            (gram - DMatrix::identity(basis.ncols(), basis.ncols())).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if residual > ORTH_TOL {
            return Err(Error::InvalidInput(format!("basis is not orthonormal (residual {residual:.3e})")));
        }
        Ok(Subspace { ambient_dim: basis.nrows(), basis })
    }

    /// Span of arbitrary vectors; directions below `tol` relative weight are dropped.
    pub fn span(ambient_dim: usize, vectors: &[ComplexVector], tol: f64) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(ambient_dim);
        }
        let weights = HermitianOperator::weighted_sum(ambient_dim, vectors.iter().map(|v| (1.0, v.clone())));
        Self::dominant_eigenspace(&weights, |lambda, max| lambda > (tol * max).max(ZERO_FLOOR))
    }

    fn dominant_eigenspace(op: &HermitianOperator, keep: impl Fn(f64, f64) -> bool) -> Self {
        let eig = op.eig();
        let max = eig.values.last().copied().unwrap_or(0.0);
        let cols: Vec<usize> = (0..eig.values.len()).filter(|&j| keep(eig.values[j], max)).collect();
        let basis = DMatrix::from_fn(op.dim(), cols.len(), |i, j| eig.vectors[(i, cols[j])]);
        Subspace { ambient_dim: op.dim(), basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<ComplexVector> {
        (0..self.dim()).map(|j| self.basis.column(j).into_owned()).collect()
    }

    pub fn projector(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(ComplexMatrix::from(&self.basis * self.basis.adjoint()))
    }

    pub fn complement(&self) -> Subspace {
        let rest = HermitianOperator::identity(self.ambient_dim).sub(&self.projector());
        Self::dominant_eigenspace(&rest, |lambda, _| lambda > 0.5)
    }

    /// Norm of the component of `v` outside the subspace.
    pub fn residual(&self, v: &ComplexVector) -> f64 {
        let coeffs = self.basis.adjoint() * v;
        (v - &self.basis * coeffs).norm()
    }

    fn ensure_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::LayoutMismatch(format!(
                "subspaces live in dimensions {} and {}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }

    /// Eigenvalues of `P_A + P_B` are `1 ± cos θ` over the principal angles;
    /// those at 2 span the intersection.
    pub fn intersection(&self, other: &Subspace, tol: f64) -> Result<Subspace> {
        self.ensure_same_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient_dim));
        }
        let sum = self.projector().add(&other.projector());
        Ok(Self::dominant_eigenspace(&sum, |lambda, _| lambda >= 2.0 - tol))
    }

    pub fn sum(&self, other: &Subspace, tol: f64) -> Result<Subspace> {
        self.ensure_same_ambient(other)?;
        let sum = self.projector().add(&other.projector());
        Ok(Self::dominant_eigenspace(&sum, |lambda, _| lambda > tol))
    }

    /// `{x : M x ∈ S}`, the null space of `(I − P_S) M`. Eigenvalues of
    /// `M†(I − P_S)M` up to `tol · ‖M‖²` count as null.
    pub fn preimage_under(&self, m: &ComplexMatrix, tol: f64) -> Result<Subspace> {
        if m.rows() != self.ambient_dim {
            return Err(Error::LayoutMismatch(format!(
                "map has {} rows, subspace lives in dimension {}",
                m.rows(),
                self.ambient_dim
            )));
        }
        let outside = HermitianOperator::identity(self.ambient_dim).sub(&self.projector());
        let k = outside.matrix() * m;
        let gram = HermitianOperator::symmetrized(&k.adjoint() * &k);
        let scale = HermitianOperator::symmetrized(&m.adjoint() * m).max_eigenvalue();
        let threshold = tol * scale.max(ZERO_FLOOR);
        let eig = gram.eig();
        let cols: Vec<usize> = (0..eig.values.len()).filter(|&j| eig.values[j] <= threshold).collect();
        let basis = DMatrix::from_fn(m.cols(), cols.len(), |i, j| eig.vectors[(i, cols[j])]);
        Ok(Subspace { ambient_dim: m.cols(), basis })
    }
}

/// Span of the eigenvectors of a PSD operator whose eigenvalues exceed
/// `tol · λ_max` (and an absolute floor, so the zero operator has empty support).
pub fn support_projector(op: &HermitianOperator, tol: f64) -> Result<Subspace> {
    op.check_psd()?;
    Ok(Subspace::dominant_eigenspace(op, |lambda, max| lambda > (tol * max).max(ZERO_FLOOR)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;
    use crate::random::{random_psd, rng};
    use crate::tol::SUPPORT_TOL;

    fn line(d: usize, k: usize) -> Subspace {
        Subspace::span(d, &[basis_vector(d, k)], 1e-9)
    }

    #[test]
    fn support_of_pure_projector_is_its_line() {
        let p = HermitianOperator::projector_onto(&basis_vector(3, 0));
        let s = support_projector(&p, SUPPORT_TOL).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.residual(&basis_vector(3, 0)) < 1e-14);
        assert_eq!(support_projector(&HermitianOperator::identity(4), SUPPORT_TOL).unwrap().dim(), 4);
        assert_eq!(support_projector(&HermitianOperator::zeros(3), SUPPORT_TOL).unwrap().dim(), 0);
    }

    #[test]
    fn support_rejects_negative_operators() {
        let op = HermitianOperator::new(ComplexMatrix::from_diagonal(&[1.0, -0.1])).unwrap();
        assert!(matches!(support_projector(&op, SUPPORT_TOL), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn support_projection_leaves_operator_invariant() {
        let mut r = rng(21);
        for (d, rank) in [(3, 1), (4, 2), (6, 3), (5, 5)] {
            let a = random_psd(d, rank, &mut r);
            let s = support_projector(&a, SUPPORT_TOL).unwrap();
            assert_eq!(s.dim(), rank);
            let p = s.projector();
            assert!(a.conjugate_by(p.matrix()).max_abs_diff(&a) < 1e-9);
        }
    }

    #[test]
    fn orthogonal_lines_meet_only_at_zero() {
        let a = line(2, 0);
        let b = line(2, 1);
        assert_eq!(a.intersection(&b, INTERSECTION_TOL).unwrap().dim(), 0);
        let s = a.sum(&b, INTERSECTION_TOL).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(a.intersection(&a, INTERSECTION_TOL).unwrap().dim(), 1);
    }

    #[test]
    fn plane_intersections() {
        let xy = Subspace::span(3, &[basis_vector(3, 0), basis_vector(3, 1)], 1e-9);
        let yz = Subspace::span(3, &[basis_vector(3, 1), basis_vector(3, 2)], 1e-9);
        let meet = xy.intersection(&yz, INTERSECTION_TOL).unwrap();
        assert_eq!(meet.dim(), 1);
        assert!(meet.residual(&basis_vector(3, 1)) < 1e-12);
        assert_eq!(xy.sum(&yz, INTERSECTION_TOL).unwrap().dim(), 3);
        assert_eq!(xy.complement().dim(), 1);
        assert!(xy.complement().residual(&basis_vector(3, 2)) < 1e-12);
    }

    #[test]
    fn preimage_under_scaled_identity() {
        let m = ComplexMatrix::identity(2).scale(std::f64::consts::FRAC_1_SQRT_2);
        let pre = line(2, 0).preimage_under(&m, 1e-9).unwrap();
        assert_eq!(pre.dim(), 1);
        assert!(pre.residual(&basis_vector(2, 0)) < 1e-14);
    }

    #[test]
    fn preimage_includes_kernel() {
        // M = |0⟩⟨1|: everything maps into span{|0⟩}
        let m = ComplexMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 1));
        assert_eq!(line(2, 0).preimage_under(&m, 1e-9).unwrap().dim(), 2);
        // only the kernel maps into span{|1⟩}
        let pre = line(2, 1).preimage_under(&m, 1e-9).unwrap();
        assert_eq!(pre.dim(), 1);
        assert!(pre.residual(&basis_vector(2, 0)) < 1e-14);
    }

    #[test]
    fn mismatched_ambient_dimensions_are_rejected() {
        assert!(line(2, 0).intersection(&line(3, 0), 1e-7).is_err());
        assert!(Subspace::from_orthonormal(DMatrix::from_element(2, 1, Complex64::new(1.0, 0.0))).is_err());
    }
}
