//! Gram matrices of the vectors `|k⟩_i |φ_ς⟩_ī` spanning the supports of the
//! structured POVM elements, built both numerically and from closed-form blocks.
//!
//! The largest admissible constant `c` is `1/λ_max(G)`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::antisym::{antisym_basis_vector, increasing_tuples, IncreasingTuple};
use crate::discriminator::Regime;
use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, kron_vec, permute_vector, ComplexMatrix, ComplexVector, HermitianOperator, SubsystemLayout,
};
use crate::tol::Cap;

/// `(i, ς, k)`: register `i` (1-based) holds level `k`, the other `n` factors hold `|φ_ς⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramLabel {
    pub register: usize,
    pub tuple: IncreasingTuple,
    pub level: usize,
}

impl GramLabel {
    /// The block this label falls in: `Γ_ς` when `k ∈ ς`, otherwise `Λ_{ς ∪ {k}}`.
    pub fn block(&self) -> BlockKind {
        match self.tuple.with(self.level) {
            None => BlockKind::Gamma(self.tuple.clone()),
            Some(xi) => BlockKind::Lambda(xi),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Labels `(i, ς, k)` with `k ∈ ς`; `n² × n²`.
    Gamma(IncreasingTuple),
    /// Labels `(i, ξ∖{k}, k)` with `k ∈ ξ`, `|ξ| = n + 1`; `n(n+1) × n(n+1)`.
    Lambda(IncreasingTuple),
}

fn check_regime(m: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::WrongRegime { m, n, reason: "need at least one state".into() });
    }
    Regime::for_dims(m, n).map(|_| ())
}

/// All labels in canonical order: lexicographic by `(i, ς, k)`, `k` over `0..m`.
pub fn gram_labels(m: usize, n: usize) -> Result<Vec<GramLabel>> {
    check_regime(m, n)?;
    let tuples = increasing_tuples(m, n);
    let mut labels = Vec::with_capacity(n * m * tuples.len());
    for register in 1..=n {
        for tuple in &tuples {
            for level in 0..m {
                labels.push(GramLabel { register, tuple: tuple.clone(), level });
            }
        }
    }
    Ok(labels)
}

/// The labelled vectors `|k⟩_i |φ_ς⟩_ī` in dimension `m^(n+1)`.
#[derive(Clone, Debug)]
pub struct LabeledBasis {
    pub m: usize,
    pub n: usize,
    pub labels: Vec<GramLabel>,
    pub vectors: Vec<ComplexVector>,
}

impl LabeledBasis {
    /// `Σ |v⟩⟨v|` over all labelled vectors.
    pub fn frame_operator(&self) -> HermitianOperator {
        let dim = self.vectors.first().map_or(0, |v| v.len());
        HermitianOperator::weighted_sum(dim, self.vectors.iter().map(|v| (1.0, v.clone())))
    }
}

pub fn build_basis_vectors(m: usize, n: usize, cap: Cap) -> Result<LabeledBasis> {
    check_regime(m, n)?;
    cap.check_vector_power(m, n + 1)?;
    let layout = SubsystemLayout::uniform(m, n + 1);
    let labels = gram_labels(m, n)?;
    let mut wedges: HashMap<&IncreasingTuple, ComplexVector> = HashMap::new();
    let vectors = labels
        .iter()
        .map(|label| {
            let phi = wedges.entry(&label.tuple).or_insert_with(|| antisym_basis_vector(&label.tuple, m));
            let local = kron_vec(&basis_vector(m, label.level), phi);
            // the level factor moves from position 0 to register i's slot
            let r = label.register;
            let images: Vec<usize> = (1..r).chain(std::iter::once(0)).chain(r..=n).collect();
            permute_vector(&local, &layout, &images).map(|(v, _)| v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledBasis { m, n, labels, vectors })
}

/// A Gram matrix in canonical label order.
#[derive(Clone, Debug)]
pub struct GramStructure {
    pub m: usize,
    pub n: usize,
    pub labels: Vec<GramLabel>,
    pub matrix: ComplexMatrix,
}

impl GramStructure {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn operator(&self) -> HermitianOperator {
        HermitianOperator::symmetrized(self.matrix.clone())
    }

    /// Label indices grouped by block, blocks in order of first appearance.
    pub fn block_partition(&self) -> Vec<(BlockKind, Vec<usize>)> {
        let mut order: Vec<(BlockKind, Vec<usize>)> = Vec::new();
        let mut slot: HashMap<BlockKind, usize> = HashMap::new();
        for (idx, label) in self.labels.iter().enumerate() {
            let kind = label.block();
            let at = *slot.entry(kind.clone()).or_insert_with(|| {
                order.push((kind, Vec::new()));
                order.len() - 1
            });
            order[at].1.push(idx);
        }
        order
    }

    /// The principal submatrix on the given label indices.
    pub fn submatrix(&self, indices: &[usize]) -> ComplexMatrix {
        ComplexMatrix::from_fn(indices.len(), indices.len(), |a, b| self.matrix[(indices[a], indices[b])])
    }
}

/// Pairwise inner products `⟨v_a|v_b⟩` of a labelled basis.
pub fn gram_numeric(basis: &LabeledBasis) -> GramStructure {
    let dim = basis.vectors.first().map_or(0, |v| v.len());
    let v = DMatrix::from_columns(&basis.vectors).resize(dim, basis.vectors.len(), Complex64::new(0.0, 0.0));
    GramStructure { m: basis.m, n: basis.n, labels: basis.labels.clone(), matrix: (v.adjoint() * v).into() }
}

fn sign(exponent: isize) -> f64 {
    if exponent.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed-form `Γ_ς`: `δ_kl` on the diagonal register blocks and
/// `(−1)^{i−j+1}/n · δ_kl` between registers `i ≠ j`. Labels `(i, k)` with `k ∈ ς`.
pub fn gamma_block(tuple: &IncreasingTuple) -> ComplexMatrix {
    let n = tuple.len();
    ComplexMatrix::from_fn(n * n, n * n, |a, b| {
        let (i, k) = (a / n, a % n);
        let (j, l) = (b / n, b % n);
        let value = match (i == j, k == l) {
            (true, true) => 1.0,
            (false, true) => sign(i as isize - j as isize + 1) / n as f64,
            _ => 0.0,
        };
        Complex64::new(value, 0.0)
    })
}

/// Closed-form `Λ_ξ`: identity diagonal and `(−1)^{j−i+ξ⁻¹(k)−ξ⁻¹(l)}/n`
/// between registers `i ≠ j` with levels `k ≠ l`. Labels `(i, k)` with `k ∈ ξ`,
/// the level indexed by its position in `ξ`.
pub fn lambda_block(xi: &IncreasingTuple) -> ComplexMatrix {
    let width = xi.len();
    let n = width - 1;
    let size = n * width;
    ComplexMatrix::from_fn(size, size, |a, b| {
        let (i, pk) = (a / width, a % width);
        let (j, pl) = (b / width, b % width);
        let value = if a == b {
            1.0
        } else if i != j && pk != pl {
            sign(j as isize - i as isize + pk as isize - pl as isize) / n as f64
        } else {
            0.0
        };
        Complex64::new(value, 0.0)
    })
}

/// Label index of block row `a` within the canonical order.
fn block_label(kind: &BlockKind, a: usize, n: usize) -> GramLabel {
    match kind {
        BlockKind::Gamma(tuple) => {
            GramLabel { register: a / n + 1, tuple: tuple.clone(), level: tuple.entries()[a % n] }
        }
        BlockKind::Lambda(xi) => {
            let level = xi.entries()[a % (n + 1)];
            GramLabel { register: a / (n + 1) + 1, tuple: xi.without(level).expect("level drawn from ξ"), level }
        }
    }
}

/// Direct sum of all `Γ_ς` and `Λ_ξ` blocks, scattered into canonical order.
pub fn gram_closed_form(m: usize, n: usize) -> Result<GramStructure> {
    let labels = gram_labels(m, n)?;
    let index: HashMap<&GramLabel, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let blocks = increasing_tuples(m, n)
        .into_iter()
        .map(|t| (gamma_block(&t), BlockKind::Gamma(t)))
        .chain(increasing_tuples(m, n + 1).into_iter().map(|x| (lambda_block(&x), BlockKind::Lambda(x))));
    let mut matrix = ComplexMatrix::zeros(labels.len(), labels.len());
    for (block, kind) in blocks {
        let rows: Vec<usize> = (0..block.rows()).map(|a| index[&block_label(&kind, a, n)]).collect();
        for (a, &ra) in rows.iter().enumerate() {
            for (b, &rb) in rows.iter().enumerate() {
                matrix[(ra, rb)] = block[(a, b)];
            }
        }
    }
    Ok(GramStructure { m, n, labels, matrix })
}

/// Largest eigenvalues of a Gram matrix and of its blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalEigenvalues {
    pub global: f64,
    pub gamma: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `max |G_ab|` over label pairs in different blocks.
    pub off_block: f64,
}

pub fn extremal_eigenvalues(g: &GramStructure) -> ExtremalEigenvalues {
    let partition = g.block_partition();
    let mut block_of = vec![0; g.dim()];
    let (mut gamma, mut lambda) = (Vec::new(), Vec::new());
    for (b, (kind, indices)) in partition.iter().enumerate() {
        for &i in indices {
            block_of[i] = b;
        }
        let top = HermitianOperator::symmetrized(g.submatrix(indices)).max_eigenvalue();
        match kind {
            BlockKind::Gamma(_) => gamma.push(top),
            BlockKind::Lambda(_) => lambda.push(top),
        }
    }
    let mut off_block: f64 = 0.0;
    for a in 0..g.dim() {
        for b in 0..g.dim() {
            if block_of[a] != block_of[b] {
                off_block = off_block.max(g.matrix[(a, b)].norm());
            }
        }
    }
    ExtremalEigenvalues { global: g.operator().max_eigenvalue(), gamma, lambda, off_block }
}

/// `1/λ_max` of the brute-force Gram matrix.
pub fn c_optimal(m: usize, n: usize, cap: Cap) -> Result<f64> {
    let g = gram_numeric(&build_basis_vectors(m, n, cap)?);
    Ok(1.0 / g.operator().max_eigenvalue())
}

/// `n/(n+1)` for `m = n`, `1/n` for `m > n`.
pub fn optimal_constant(m: usize, n: usize) -> Result<f64> {
    check_regime(m, n)?;
    Ok(Regime::for_dims(m, n)?.constant(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cap() -> Cap {
        Cap::default()
    }

    #[test]
    fn label_counts() {
        assert_eq!(gram_labels(2, 2).unwrap().len(), 4);
        assert_eq!(gram_labels(3, 2).unwrap().len(), 18);
        assert_eq!(gram_labels(5, 3).unwrap().len(), 150);
        assert!(matches!(gram_labels(2, 3), Err(Error::WrongRegime { .. })));
    }

    #[test]
    fn basis_vectors_are_unit() {
        let basis = build_basis_vectors(3, 2, cap()).unwrap();
        assert_eq!(basis.vectors.len(), 18);
        for v in &basis.vectors {
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pair_blocks() {
        let g = gram_numeric(&build_basis_vectors(2, 2, cap()).unwrap());
        // labels: (1,k=0), (1,k=1), (2,k=0), (2,k=1)
        for a in 0..2 {
            for b in 0..2 {
                let expect = if a == b { 0.5 } else { 0.0 };
                assert!((g.matrix[(a, 2 + b)] - Complex64::new(expect, 0.0)).norm() < 1e-14);
                let diag = if a == b { 1.0 } else { 0.0 };
                assert!((g.matrix[(a, b)] - Complex64::new(diag, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn closed_form_matches_numeric() {
        for (m, n) in [(2, 2), (3, 3), (3, 2), (4, 2), (4, 3), (5, 2)] {
            let numeric = gram_numeric(&build_basis_vectors(m, n, cap()).unwrap());
            let closed = gram_closed_form(m, n).unwrap();
            assert!(numeric.matrix.max_abs_diff(&closed.matrix) < 1e-12, "m = {m}, n = {n}");
        }
    }

    #[test]
    fn lambda_block_for_pairs() {
        let xi = IncreasingTuple::new(vec![0, 1, 2]).unwrap();
        let block = lambda_block(&xi);
        assert_eq!(block.rows(), 6);
        // (i, k) = (1, ξ₁) against (2, ξ₂) and (2, ξ₃)
        assert_eq!(block[(0, 4)], Complex64::new(0.5, 0.0));
        assert_eq!(block[(0, 5)], Complex64::new(-0.5, 0.0));
        assert_eq!(block[(0, 3)], Complex64::new(0.0, 0.0));
        assert_eq!(block[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn block_counts_and_maxima() {
        let g = gram_closed_form(4, 2).unwrap();
        let ext = extremal_eigenvalues(&g);
        assert_eq!(ext.gamma.len(), 6);
        assert_eq!(ext.lambda.len(), 4);
        assert_eq!(ext.off_block, 0.0);

        let ext = extremal_eigenvalues(&gram_numeric(&build_basis_vectors(3, 2, cap()).unwrap()));
        assert!(ext.gamma.iter().all(|x| (x - 1.5).abs() < 1e-9));
        assert!(ext.lambda.iter().all(|x| (x - 2.0).abs() < 1e-9));
        assert!((ext.global - 2.0).abs() < 1e-9);
        assert!(ext.off_block < 1e-14);
    }

    #[test]
    fn equal_regime_maxima() {
        for (n, expect) in [(2, 1.5), (3, 4.0 / 3.0)] {
            let ext = extremal_eigenvalues(&gram_numeric(&build_basis_vectors(n, n, cap()).unwrap()));
            assert!((ext.global - expect).abs() < 1e-9);
            assert!(ext.lambda.is_empty());
        }
    }

    #[test]
    fn frame_operator_shares_the_spectrum() {
        let basis = build_basis_vectors(3, 2, cap()).unwrap();
        let g = gram_numeric(&basis).operator().eig().values;
        let frame = basis.frame_operator().eig().values;
        let nonzero = |v: &[f64]| v.iter().copied().filter(|x| *x > 1e-9).collect::<Vec<_>>();
        let (a, b) = (nonzero(&g), nonzero(&frame));
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
    }

    #[test]
    fn constants() {
        for (m, n, expect) in [(2, 2, 2.0 / 3.0), (3, 2, 0.5), (4, 3, 1.0 / 3.0)] {
            let c = c_optimal(m, n, cap()).unwrap();
            assert!((c - expect).abs() < 1e-9);
            assert!((c - optimal_constant(m, n).unwrap()).abs() < 1e-9);
        }
    }
}
