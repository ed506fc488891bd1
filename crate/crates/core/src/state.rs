//! Pure states and ordered state sets.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, kron_vecs, ComplexMatrix, ComplexVector, HermitianOperator};
use crate::tol::DEPENDENCE_TOL;

/// A unit vector in `C^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(ComplexVector);

impl PureState {
    /// Normalizes the given amplitudes; fails on zero or non-finite input.
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("state amplitudes must be finite".into()));
        }
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm == 0.0 {
            return Err(Error::InvalidInput("state vector must be nonzero".into()));
        }
        Ok(PureState(amplitudes.unscale(norm)))
    }

    pub fn from_amplitudes(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(ComplexVector::from_column_slice(amplitudes))
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Self {
        PureState(basis_vector(dim, k))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.0
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn density(&self) -> HermitianOperator {
        HermitianOperator::projector_onto(&self.0)
    }
}

/// An ordered list of `n` pure states sharing the dimension `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSet {
    dim: usize,
    states: Vec<PureState>,
}

impl StateSet {
    pub fn new(states: Vec<PureState>) -> Result<Self> {
        let dim = states
            .first()
            .map(PureState::dim)
            .ok_or_else(|| Error::InvalidInput("state set must not be empty".into()))?;
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::LayoutMismatch(format!("state of dimension {} in a set of dimension {dim}", bad.dim())));
        }
        Ok(StateSet { dim, states })
    }

    /// Number of states, `n`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dimension of each state, `m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn vectors(&self) -> impl Iterator<Item = &ComplexVector> {
        self.states.iter().map(PureState::vector)
    }

    /// `|ψ₁⟩⊗…⊗|ψ_n⟩`.
    pub fn product_vector(&self) -> ComplexVector {
        kron_vecs(self.vectors())
    }

    pub fn gram(&self) -> ComplexMatrix {
        gram(self)
    }

    /// `det X`, real and non-negative up to rounding.
    pub fn gram_determinant(&self) -> f64 {
        self.gram().determinant().re
    }

    pub fn is_linearly_independent(&self) -> bool {
        self.gram_determinant() > DEPENDENCE_TOL
    }

    /// The same states with positions `a` and `b` (0-based) exchanged.
    pub fn swapped(&self, a: usize, b: usize) -> StateSet {
        let mut states = self.states.clone();
        states.swap(a, b);
        StateSet { dim: self.dim, states }
    }
}

/// Gram matrix `X_{ij} = ⟨ψ_i|ψ_j⟩`.
pub fn gram(states: &StateSet) -> ComplexMatrix {
    let n = states.len();
    ComplexMatrix::from_fn(n, n, |i, j| states.states[i].inner(&states.states[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_state_set, rng};

    #[test]
    fn orthonormal_pair_has_identity_gram() {
        let set = StateSet::new(vec![PureState::basis(2, 0), PureState::basis(2, 1)]).unwrap();
        assert_eq!(set.gram(), ComplexMatrix::identity(2));
    }

    #[test]
    fn gram_entries_are_overlaps() {
        let s = Complex64::new(0.3, -0.4);
        let amp = (1.0 - s.norm_sqr()).sqrt();
        let a = PureState::basis(2, 0);
        let b = PureState::from_amplitudes(&[s, Complex64::new(amp, 0.0)]).unwrap();
        let x = StateSet::new(vec![a, b]).unwrap().gram();
        assert!((x[(0, 1)] - s).norm() < 1e-15);
        assert!((x[(1, 0)] - s.conj()).norm() < 1e-15);
        assert!((x[(0, 0)].re - 1.0).abs() < 1e-15 && (x[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coplanar_triple_is_dependent() {
        let mk = |v: [f64; 3]| PureState::from_amplitudes(&v.map(|x| Complex64::new(x, 0.0))).unwrap();
        let set = StateSet::new(vec![mk([1.0, 0.0, 0.0]), mk([0.0, 1.0, 0.0]), mk([1.0, 1.0, 0.0])]).unwrap();
        assert!(set.gram_determinant().abs() < 1e-15);
        assert!(!set.is_linearly_independent());
    }

    #[test]
    fn gram_is_psd_and_determinant_tracks_rank() {
        let mut r = rng(31);
        for n in 1..=4 {
            for m in 1..=4 {
                let set = random_state_set(m, n, &mut r);
                let x = HermitianOperator::new(set.gram()).unwrap();
                let eig = x.eig();
                assert!(eig.values[0] > -1e-12);
                let rank = eig.values.iter().filter(|&&l| l > 1e-9).count();
                assert_eq!(rank == n, set.gram_determinant() > 1e-12, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn rejects_empty_and_ragged_sets() {
        assert!(StateSet::new(vec![]).is_err());
        assert!(StateSet::new(vec![PureState::basis(2, 0), PureState::basis(3, 0)]).is_err());
        assert!(PureState::from_amplitudes(&[Complex64::new(0.0, 0.0)]).is_err());
    }
}
