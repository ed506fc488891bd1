//! Permutations of tensor factors and the antisymmetric subspace `∧ⁿH`.

use itertools::Itertools;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{kron_vecs, ComplexMatrix, ComplexVector, HermitianOperator};
use crate::state::StateSet;
use crate::tol::Cap;

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn binomial(m: usize, n: usize) -> u64 {
    if n > m {
        return 0;
    }
    let n = n.min(m - n);
    (0..n).fold(1u64, |acc, k| acc * (m - k) as u64 / (k + 1) as u64)
}

/// A permutation of `{0, …, n−1}`, stored as its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
    sign: i8,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        let sign = cycle_parity(&images);
        Ok(Permutation { images, sign })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect(), sign: 1 }
    }

    /// Exchanges `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::InvalidInput(format!("transposition ({a} {b}) outside degree {n}")));
        }
        images.swap(a, b);
        Self::new(images)
    }

    /// All of `S(n)` in lexicographic order of the image lists.
    pub fn all(n: usize) -> Vec<Permutation> {
        (0..n)
            .permutations(n)
            .map(|images| {
                let sign = cycle_parity(&images);
                Permutation { images, sign }
            })
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image(&self, k: usize) -> usize {
        self.images[k]
    }

    pub fn sign(&self) -> f64 {
        self.sign as f64
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (k, &s) in self.images.iter().enumerate() {
            inv[s] = k;
        }
        Permutation { images: inv, sign: self.sign }
    }

    /// The permutation whose factor operator is `op(self) · op(other)`.
    ///
    /// Under `op(σ)|ω₁…ω_n⟩ = |ω_{σ₁}…ω_{σ_n}⟩` this is `k ↦ other(self(k))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        let images = self.images.iter().map(|&s| other.images[s]).collect();
        Permutation { images, sign: self.sign * other.sign }
    }

    /// Acts as `self` on the first `degree` positions and fixes `extra` trailing ones.
    pub fn extended(&self, extra: usize) -> Permutation {
        let n = self.degree();
        let images = self.images.iter().copied().chain(n..n + extra).collect();
        Permutation { images, sign: self.sign }
    }
}

fn cycle_parity(images: &[usize]) -> i8 {
    let mut visited = vec![false; images.len()];
    let mut sign = 1i8;
    for start in 0..images.len() {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !visited[k] {
            visited[k] = true;
            k = images[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Strictly increasing indices `ς₁ < … < ς_n` from `{0, …, m−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IncreasingTuple(Vec<usize>);

impl IncreasingTuple {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!("{entries:?} is not strictly increasing")));
        }
        Ok(IncreasingTuple(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    /// 0-based position of `k` within the tuple.
    pub fn position(&self, k: usize) -> Option<usize> {
        self.0.binary_search(&k).ok()
    }

    /// The tuple with `k` removed.
    pub fn without(&self, k: usize) -> Option<IncreasingTuple> {
        let pos = self.position(k)?;
        let mut entries = self.0.clone();
        entries.remove(pos);
        Some(IncreasingTuple(entries))
    }

    /// The tuple with `k` inserted.
    pub fn with(&self, k: usize) -> Option<IncreasingTuple> {
        match self.0.binary_search(&k) {
            Ok(_) => None,
            Err(pos) => {
                let mut entries = self.0.clone();
                entries.insert(pos, k);
                Some(IncreasingTuple(entries))
            }
        }
    }
}

/// All `C(m, n)` increasing `n`-tuples in lexicographic order; empty when `n > m`.
pub fn increasing_tuples(m: usize, n: usize) -> Vec<IncreasingTuple> {
    if n > m {
        return Vec::new();
    }
    (0..m).combinations(n).map(IncreasingTuple).collect()
}

fn permuted_index(digits: &[usize], perm: &Permutation, m: usize) -> usize {
    perm.images.iter().fold(0, |acc, &s| acc * m + digits[s])
}

fn digits_of(mut index: usize, m: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for k in (0..n).rev() {
        out[k] = index % m;
        index /= m;
    }
    out
}

/// The 0/1 unitary `|ω₁…ω_n⟩ ↦ |ω_{σ₁}…ω_{σ_n}⟩` on `(C^m)^{⊗n}`.
pub fn permutation_operator(sigma: &Permutation, m: usize, cap: Cap) -> Result<ComplexMatrix> {
    let n = sigma.degree();
    if n == 0 {
        return Err(Error::InvalidInput("permutation of degree 0".into()));
    }
    let dim = cap.check_power(m, n)?;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for a in 0..dim {
        out[(permuted_index(&digits_of(a, m, n), sigma, m), a)] = Complex64::new(1.0, 0.0);
    }
    Ok(out)
}

/// `(1/√n!) Σ_σ sgn(σ) |φ_{σ₁}⟩…|φ_{σ_n}⟩`. Its squared norm is `det X`.
pub fn wedge(states: &StateSet, cap: Cap) -> Result<ComplexVector> {
    let n = states.len();
    let dim = cap.check_vector_power(states.dim(), n)?;
    let vectors: Vec<&ComplexVector> = states.vectors().collect();
    let mut out = ComplexVector::zeros(dim);
    for sigma in Permutation::all(n) {
        let term = kron_vecs(sigma.images.iter().map(|&s| vectors[s]));
        out.axpy(Complex64::new(sigma.sign(), 0.0), &term, Complex64::new(1.0, 0.0));
    }
    Ok(out.unscale(factorial(n).sqrt()))
}

/// Unit vector `|ς₁⟩ ∧ … ∧ |ς_n⟩`.
///
/// The `1/√n!` prefactor is kept so that these vectors form an orthonormal
/// basis of `∧ⁿH`.
pub fn antisym_basis_vector(tuple: &IncreasingTuple, m: usize) -> ComplexVector {
    let n = tuple.len();
    let mut out = ComplexVector::zeros(m.pow(n as u32));
    let norm = factorial(n).sqrt();
    for sigma in Permutation::all(n) {
        let digits: Vec<usize> = sigma.images.iter().map(|&s| tuple.0[s]).collect();
        let index = digits.iter().fold(0, |acc, &d| acc * m + d);
        out[index] += Complex64::new(sigma.sign() / norm, 0.0);
    }
    out
}

/// `Φ(n) = (1/n!) Σ_σ sgn(σ) σ`, assembled column by column.
///
/// Columns whose digits repeat vanish; the others receive exactly one
/// `±1/n!` entry per permutation.
pub fn projector_from_permutations(m: usize, n: usize, cap: Cap) -> Result<HermitianOperator> {
    let dim = cap.check_power(m, n)?;
    let perms = Permutation::all(n);
    let weight = 1.0 / factorial(n);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for b in 0..dim {
        let digits = digits_of(b, m, n);
        if !digits.iter().all_unique() {
            continue;
        }
        for sigma in &perms {
            out[(permuted_index(&digits, sigma, m), b)] = Complex64::new(sigma.sign() * weight, 0.0);
        }
    }
    Ok(HermitianOperator::symmetrized(out))
}

/// `Φ(n) = Σ_ς |φ_ς⟩⟨φ_ς|` over the increasing-tuple basis.
pub fn projector_from_basis(m: usize, n: usize, cap: Cap) -> Result<HermitianOperator> {
    let dim = cap.check_power(m, n)?;
    Ok(HermitianOperator::weighted_sum(dim, increasing_tuples(m, n).iter().map(|t| (1.0, antisym_basis_vector(t, m)))))
}

/// The orthogonal projector onto `∧ⁿ(C^m)`.
#[derive(Clone, Debug)]
pub struct AntisymProjector {
    m: usize,
    n: usize,
    operator: HermitianOperator,
}

impl AntisymProjector {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.operator
    }

    /// `dim ∧ⁿH = C(m, n)`.
    pub fn rank(&self) -> u64 {
        binomial(self.m, self.n)
    }
}

pub fn antisym_projector(m: usize, n: usize, cap: Cap) -> Result<AntisymProjector> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidInput(format!("antisymmetric projector needs m, n ≥ 1 (got {m}, {n})")));
    }
    let operator = projector_from_permutations(m, n, cap)?;
    Ok(AntisymProjector { m, n, operator })
}

/// `⟨φ|Φ(n)|φ⟩` for the product `|φ⟩ = |φ₁⟩…|φ_n⟩`, which equals `det X / n!`.
pub fn antisym_overlap(states: &StateSet, cap: Cap) -> Result<f64> {
    let phi = antisym_projector(states.dim(), states.len(), cap)?;
    let value = phi.operator.expectation(&states.product_vector());
    debug_assert!(
        (value - states.gram_determinant() / factorial(states.len())).abs() < 1e-9,
        "quadratic form and Gram determinant disagree"
    );
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vector;
    use crate::random::{overlapping_pair, random_state_set, rng, TestRng};
    use crate::state::PureState;
    use rand::seq::IndexedRandom;

    fn cap() -> Cap {
        Cap::default()
    }

    #[test]
    fn sign_from_cycles() {
        assert_eq!(Permutation::identity(4).sign(), 1.0);
        assert_eq!(Permutation::transposition(3, 0, 2).unwrap().sign(), -1.0);
        assert_eq!(Permutation::new(vec![1, 2, 0]).unwrap().sign(), 1.0);
        assert_eq!(Permutation::new(vec![1, 0, 3, 2]).unwrap().sign(), 1.0);
        assert!(Permutation::new(vec![0, 0]).is_err());
        let even = Permutation::all(4).iter().filter(|p| p.sign() > 0.0).count();
        assert_eq!(even, 12);
    }

    #[test]
    fn identity_permutation_is_identity_matrix() {
        let op = permutation_operator(&Permutation::identity(3), 2, cap()).unwrap();
        assert_eq!(op, ComplexMatrix::identity(8));
    }

    #[test]
    fn swap_maps_01_to_10() {
        let swap = permutation_operator(&Permutation::transposition(2, 0, 1).unwrap(), 2, cap()).unwrap();
        // |01⟩ is index 1, |10⟩ is index 2
        assert_eq!(swap.apply(&basis_vector(4, 1)), basis_vector(4, 2));
    }

    #[test]
    fn permutation_operators_represent_composition() {
        let mut r: TestRng = rng(7);
        let all = Permutation::all(3);
        for _ in 0..20 {
            let s = all.choose(&mut r).unwrap();
            let t = all.choose(&mut r).unwrap();
            let lhs = permutation_operator(&s.compose(t), 2, cap()).unwrap();
            let rhs = &permutation_operator(s, 2, cap()).unwrap() * &permutation_operator(t, 2, cap()).unwrap();
            assert_eq!(lhs, rhs);
            let inv = permutation_operator(&s.inverse(), 2, cap()).unwrap();
            assert_eq!(inv, permutation_operator(s, 2, cap()).unwrap().adjoint());
        }
    }

    #[test]
    fn wedge_of_basis_pair() {
        let set = StateSet::new(vec![PureState::basis(2, 0), PureState::basis(2, 1)]).unwrap();
        let w = wedge(&set, cap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expected = (basis_vector(4, 1) - basis_vector(4, 2)) * Complex64::new(s, 0.0);
        assert!((w - expected).camax() < 1e-15);
        let repeated = StateSet::new(vec![PureState::basis(2, 0), PureState::basis(2, 0)]).unwrap();
        assert_eq!(wedge(&repeated, cap()).unwrap().camax(), 0.0);
    }

    #[test]
    fn wedge_norm_is_gram_determinant() {
        let mut r = rng(17);
        for _ in 0..100 {
            for n in [2, 3] {
                for m in n..=5 {
                    let set = random_state_set(m, n, &mut r);
                    let w = wedge(&set, cap()).unwrap();
                    assert!((w.norm_squared() - set.gram_determinant()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn wedge_changes_sign_under_exchange() {
        let mut r = rng(18);
        let set = random_state_set(4, 3, &mut r);
        let w = wedge(&set, cap()).unwrap();
        let swapped = wedge(&set.swapped(0, 2), cap()).unwrap();
        assert!((w + swapped).camax() < 1e-12);
    }

    #[test]
    fn tuples_are_lexicographic() {
        let t: Vec<Vec<usize>> = increasing_tuples(3, 2).iter().map(|t| t.entries().to_vec()).collect();
        assert_eq!(t, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(increasing_tuples(4, 2).len(), 6);
        assert_eq!(increasing_tuples(5, 3).len(), 10);
        assert!(increasing_tuples(2, 3).is_empty());
        let tuple = IncreasingTuple::new(vec![1, 3, 4]).unwrap();
        assert_eq!(tuple.position(3), Some(1));
        assert_eq!(tuple.without(3).unwrap().entries(), &[1, 4]);
        assert_eq!(tuple.with(2).unwrap().entries(), &[1, 2, 3, 4]);
        assert!(IncreasingTuple::new(vec![2, 2]).is_err());
    }

    #[test]
    fn basis_vectors_are_orthonormal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = antisym_basis_vector(&IncreasingTuple::new(vec![0, 1]).unwrap(), 2);
        assert!((v - (basis_vector(4, 1) - basis_vector(4, 2)) * Complex64::new(s, 0.0)).camax() < 1e-15);
        let tuples = increasing_tuples(4, 2);
        for (a, ta) in tuples.iter().enumerate() {
            for (b, tb) in tuples.iter().enumerate() {
                let ip = antisym_basis_vector(ta, 4).dotc(&antisym_basis_vector(tb, 4));
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn both_projector_routes_agree() {
        for m in 1..=4 {
            for n in 1..=4 {
                let a = projector_from_permutations(m, n, cap()).unwrap();
                let b = projector_from_basis(m, n, cap()).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-10, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn projector_invariants() {
        for (m, n) in [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (3, 4)] {
            let phi = antisym_projector(m, n, cap()).unwrap();
            let op = phi.operator().matrix();
            assert!((op * op).max_abs_diff(op) < 1e-10);
            assert!((phi.operator().trace() - phi.rank() as f64).abs() < 1e-10);
            for sigma in Permutation::all(n) {
                let p = permutation_operator(&sigma, m, cap()).unwrap();
                assert!((&p * op).max_abs_diff(&op.scale(sigma.sign())) < 1e-10);
            }
        }
    }

    #[test]
    fn two_qubit_projector_is_singlet() {
        let phi = antisym_projector(2, 2, cap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = (basis_vector(4, 1) - basis_vector(4, 2)) * Complex64::new(s, 0.0);
        assert!(phi.operator().max_abs_diff(&HermitianOperator::projector_onto(&singlet)) < 1e-15);
        assert_eq!((antisym_projector(4, 2, cap()).unwrap().operator().trace() - 6.0).abs(), 0.0);
        assert_eq!(antisym_projector(2, 3, cap()).unwrap().operator().matrix().max_abs(), 0.0);
    }

    #[test]
    fn overlap_matches_gram_determinant() {
        let pair = StateSet::new(vec![PureState::basis(3, 0), PureState::basis(3, 1)]).unwrap();
        assert!((antisym_overlap(&pair, cap()).unwrap() - 0.5).abs() < 1e-15);
        let mk = |v: [f64; 3]| PureState::from_amplitudes(&v.map(|x| Complex64::new(x, 0.0))).unwrap();
        let dependent = StateSet::new(vec![mk([1.0, 0.0, 0.0]), mk([0.0, 1.0, 0.0]), mk([1.0, -2.0, 0.0])]).unwrap();
        assert!(antisym_overlap(&dependent, cap()).unwrap().abs() < 1e-15);
        for s in [0.0, 0.3, 0.6, 0.99] {
            let got = antisym_overlap(&overlapping_pair(3, s), cap()).unwrap();
            assert!((got - (1.0 - s * s) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projector_respects_cap() {
        assert!(matches!(antisym_projector(6, 5, cap()), Err(Error::CapExceeded { .. })));
    }
}
