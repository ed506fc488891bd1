//! Seeded random draws: states, PSD operators, densities and Haar unitaries.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{ComplexMatrix, ComplexVector, HermitianOperator};
use crate::state::{PureState, StateSet};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Unitarily invariant random pure state.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v = ComplexVector::from_fn(dim, |_, _| gaussian(rng));
    PureState::new(v).expect("gaussian vector is nonzero")
}

pub fn random_state_set<R: Rng + ?Sized>(dim: usize, n: usize, rng: &mut R) -> StateSet {
    StateSet::new((0..n).map(|_| random_state(dim, rng)).collect()).expect("uniform dimensions")
}

/// Pair with `⟨ψ₁|ψ₂⟩ = overlap` (real), embedded in the first two basis directions.
pub fn overlapping_pair(dim: usize, overlap: f64) -> StateSet {
    let mut b = ComplexVector::zeros(dim);
    b[0] = Complex64::new(overlap, 0.0);
    b[1] = Complex64::new((1.0 - overlap * overlap).sqrt(), 0.0);
    StateSet::new(vec![PureState::basis(dim, 0), PureState::new(b).expect("unit vector")]).expect("uniform dimensions")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(dim, dim, rng);
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    HermitianOperator::new(h.into()).expect("symmetrized")
}

/// `G G†` for a Gaussian `dim × rank` matrix `G`: PSD with rank `min(dim, rank)`.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(dim, rank, rng);
    HermitianOperator::new((&g * g.adjoint()).into()).expect("G G† is Hermitian")
}

/// Random density operator of the given rank.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> HermitianOperator {
    let p = random_psd(dim, rank, rng);
    let t = p.trace();
    p.scale(1.0 / t)
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let qr = gaussian_matrix(dim, dim, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q.into()
}
