//! Unambiguous discrimination of mixed states through their cores.
//!
//! Each `ρ_i` splits as `ρ̃_i + ρ̂_i`, where `ρ̂_i` lives inside the span of the
//! other supports and `supp ρ̃_i` meets that span only in 0. The eigenvectors
//! of `ρ̃_1…ρ̃_n` and of `ρ̃₀ = Σ ρ̂_i` become the program of a pure-state
//! discriminator, whose outcomes are grouped by the part they came from.

use std::ops::Range;

use crate::antisym::factorial;
use crate::discriminator::{build_structured, Regime};
use crate::error::{Error, Result};
use crate::linalg::{support_projector, ComplexVector, HermitianOperator, Subspace, INTERSECTION_TOL};
use crate::state::{PureState, StateSet};
use crate::tol::{Cap, DEPENDENCE_TOL, EIGEN_TOL, EXACT_TOL, SUPPORT_TOL};

/// Null directions of `M†(I − P_S)M` relative to `‖M‖²`.
const PREIMAGE_TOL: f64 = 1e-10;
/// Part probabilities above this count as positive.
const POSITIVE_TOL: f64 = 1e-12;

/// A PSD operator of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        op.check_psd()?;
        let trace = op.trace();
        if (trace - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidInput(format!("density operator has trace {trace}")));
        }
        Ok(DensityOperator(op))
    }

    pub fn pure(state: &PureState) -> Self {
        DensityOperator(state.density())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator(HermitianOperator::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.0
    }
}

/// `ρ_i = ρ̃_i + ρ̂_i` for every state, plus `ρ̃₀ = Σ ρ̂_i`.
#[derive(Clone, Debug)]
pub struct CoreDecomposition {
    pub tildes: Vec<HermitianOperator>,
    pub hats: Vec<HermitianOperator>,
    pub tilde0: HermitianOperator,
    /// `Σ_{j≠i} supp ρ_j` for each `i`.
    pub others: Vec<Subspace>,
    rhos: Vec<HermitianOperator>,
}

/// Worst-case residuals of the decomposition's defining properties.
#[derive(Clone, Debug, PartialEq)]
pub struct CoreResiduals {
    /// `max_i ‖ρ_i − ρ̃_i − ρ̂_i‖_max`.
    pub sum: f64,
    /// `max_i ‖(I − P_{S_i}) ρ̂_i‖_max`.
    pub hat_outside: f64,
    /// `dim(supp ρ̃_i ∩ S_i)` for each `i`.
    pub intersection_dims: Vec<usize>,
    /// Smallest eigenvalue over all parts.
    pub min_eigenvalue: f64,
}

impl CoreResiduals {
    pub fn ok(&self) -> bool {
        self.sum <= EXACT_TOL
            && self.hat_outside <= EIGEN_TOL
            && self.intersection_dims.iter().all(|&d| d == 0)
            && self.min_eigenvalue >= -EIGEN_TOL
    }
}

impl CoreDecomposition {
    pub fn len(&self) -> usize {
        self.tildes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tildes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.tilde0.dim()
    }

    pub fn tilde_traces(&self) -> Vec<f64> {
        self.tildes.iter().map(HermitianOperator::trace).collect()
    }

    /// Every `ρ̃_i` carries weight.
    pub fn discriminable(&self) -> bool {
        self.tildes.iter().all(|t| t.trace() > EIGEN_TOL)
    }

    pub fn residuals(&self) -> Result<CoreResiduals> {
        let mut sum: f64 = 0.0;
        let mut hat_outside: f64 = 0.0;
        let mut intersection_dims = Vec::with_capacity(self.len());
        let mut min_eigenvalue = self.tilde0.min_eigenvalue();
        for (i, rho) in self.rhos.iter().enumerate() {
            let (tilde, hat, s) = (&self.tildes[i], &self.hats[i], &self.others[i]);
            sum = sum.max(rho.sub(tilde).sub(hat).matrix().max_abs());
            let outside = HermitianOperator::identity(self.dim()).sub(&s.projector());
            hat_outside = hat_outside.max((outside.matrix() * hat.matrix()).max_abs());
            let core = support_projector(tilde, SUPPORT_TOL)?;
            intersection_dims.push(core.intersection(s, INTERSECTION_TOL)?.dim());
            min_eigenvalue = min_eigenvalue.min(tilde.min_eigenvalue()).min(hat.min_eigenvalue());
        }
        Ok(CoreResiduals { sum, hat_outside, intersection_dims, min_eigenvalue })
    }
}

/// Splits each state with the preimage construction: on `K = supp ρ_i`, `V` is
/// the set of `x` with `√ρ_i x ∈ S_i`, and `W` its complement in `K`; then
/// `ρ̂_i = √ρ_i P_V √ρ_i` and `ρ̃_i = √ρ_i P_W √ρ_i`.
pub fn core_decompose(rhos: &[DensityOperator]) -> Result<CoreDecomposition> {
    if rhos.len() < 2 {
        return Err(Error::InvalidInput(format!("need at least two states, got {}", rhos.len())));
    }
    let dim = rhos[0].dim();
    if let Some(bad) = rhos.iter().find(|r| r.dim() != dim) {
        return Err(Error::LayoutMismatch(format!("densities of dimension {dim} and {}", bad.dim())));
    }
    let supports = rhos.iter().map(|r| support_projector(r.operator(), SUPPORT_TOL)).collect::<Result<Vec<_>>>()?;

    let (mut tildes, mut hats, mut others) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rho) in rhos.iter().enumerate() {
        let spanning: Vec<ComplexVector> =
            supports.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, s)| s.vectors()).collect();
        let s_i = Subspace::span(dim, &spanning, SUPPORT_TOL);
        let root = rho.operator().sqrt_psd()?;
        let k = supports[i].basis();
        // work in coordinates of K, where √ρ is injective
        let restricted = root.matrix() * &crate::linalg::ComplexMatrix::from(k.clone());
        let v_local = s_i.preimage_under(&restricted, PREIMAGE_TOL)?;
        let w_local = v_local.complement();
        let part = |local: &Subspace| -> Result<HermitianOperator> {
            if local.dim() == 0 {
                return Ok(HermitianOperator::zeros(dim));
            }
            let lifted = Subspace::from_orthonormal(k * local.basis())?;
            Ok(lifted.projector().conjugate_by(root.matrix()))
        };
        hats.push(part(&v_local)?);
        tildes.push(part(&w_local)?);
        others.push(s_i);
    }
    let tilde0 = hats.iter().fold(HermitianOperator::zeros(dim), |acc, h| acc.add(h));
    Ok(CoreDecomposition { tildes, hats, tilde0, others, rhos: rhos.iter().map(|r| r.operator().clone()).collect() })
}

/// All cores are nonzero.
pub fn discriminable(rhos: &[DensityOperator]) -> Result<bool> {
    Ok(core_decompose(rhos)?.discriminable())
}

/// Weighted pure states realizing one core.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramPart {
    pub states: Vec<ComplexVector>,
    pub weights: Vec<f64>,
}

impl ProgramPart {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn operator(&self, dim: usize) -> HermitianOperator {
        HermitianOperator::weighted_sum(dim, self.weights.iter().copied().zip(self.states.iter().cloned()))
    }
}

/// Program registers loaded part by part: `S₀`, then `S₁ … S_n`.
#[derive(Clone, Debug)]
pub struct MixedProgram {
    pub dim: usize,
    pub parts: Vec<ProgramPart>,
    states: StateSet,
}

impl MixedProgram {
    /// `N`, the number of program registers.
    pub fn total(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &StateSet {
        &self.states
    }

    /// 0-based register ranges of each part.
    pub fn boundaries(&self) -> Vec<Range<usize>> {
        let mut start = 0;
        self.parts
            .iter()
            .map(|p| {
                let r = start..start + p.len();
                start = r.end;
                r
            })
            .collect()
    }

    /// The part that register `r` (0-based) belongs to.
    pub fn part_of(&self, register: usize) -> usize {
        self.boundaries().iter().position(|r| r.contains(&register)).expect("register inside the program")
    }

    /// `|Ψ⟩`, of dimension `dim^N`.
    pub fn vector(&self) -> ComplexVector {
        self.states.product_vector()
    }

    pub fn gram_determinant(&self) -> f64 {
        self.states.gram_determinant()
    }
}

/// Eigenvectors with eigenvalue above `EIGEN_TOL` of `ρ̃₀, ρ̃₁, …, ρ̃_n`.
pub fn build_program(cores: &CoreDecomposition) -> Result<MixedProgram> {
    let dim = cores.dim();
    let parts: Vec<ProgramPart> = std::iter::once(&cores.tilde0)
        .chain(&cores.tildes)
        .map(|op| {
            let eig = op.eig();
            let keep: Vec<usize> = (0..dim).filter(|&j| eig.values[j] > EIGEN_TOL).collect();
            ProgramPart {
                states: keep.iter().map(|&j| eig.vector(j)).collect(),
                weights: keep.iter().map(|&j| eig.values[j]).collect(),
            }
        })
        .collect();
    let all: Vec<PureState> =
        parts.iter().flat_map(|p| p.states.iter().cloned()).map(PureState::new).collect::<Result<_>>()?;
    if all.is_empty() {
        return Err(Error::ProgramNotIndependent { det: 0.0 });
    }
    let states = StateSet::new(all)?;
    let det = states.gram_determinant();
    if det <= DEPENDENCE_TOL {
        return Err(Error::ProgramNotIndependent { det });
    }
    Ok(MixedProgram { dim, parts, states })
}

/// Outcome statistics of the `N`-state discriminator on `|Ψ⟩⟨Ψ| ⊗ ρ_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartProbabilities {
    pub regime: Regime,
    pub constant: f64,
    /// Per outcome `0..=N`.
    pub outcomes: Vec<f64>,
    /// Per part `0..=n`, summing the outcomes of that part's registers.
    pub parts: Vec<f64>,
    pub inconclusive: f64,
}

/// `Regime::Equal` when `dim = N ≥ 2`, otherwise `Universal` with `c = 1/N`.
pub fn program_regime(dim: usize, total: usize) -> Result<Regime> {
    if total == 0 {
        return Err(Error::ProgramNotIndependent { det: 0.0 });
    }
    if dim == total && total == 1 {
        return Ok(Regime::Universal);
    }
    Regime::for_dims(dim, total)
}

pub fn part_probabilities(program: &MixedProgram, rho_s: &DensityOperator, cap: Cap) -> Result<PartProbabilities> {
    let (d, total) = (program.dim, program.total());
    if rho_s.dim() != d {
        return Err(Error::LayoutMismatch(format!("data of dimension {} for a program in dimension {d}", rho_s.dim())));
    }
    let regime = program_regime(d, total)?;
    let constant = regime.constant(total);
    let povm = build_structured(d, total, constant, cap)?;
    let outcomes = povm.outcome_probabilities_mixed(&program.vector(), rho_s.operator())?;
    let mut parts = vec![0.0; program.parts.len()];
    for r in 0..total {
        parts[program.part_of(r)] += outcomes[r + 1];
    }
    Ok(PartProbabilities { regime, constant, inconclusive: outcomes[0], outcomes, parts })
}

/// Check of the part probabilities against the core-weighted bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    /// `c · det X / N!`: success probability of the pure-state discriminator.
    pub factor: f64,
    pub gram_determinant: f64,
    /// Lower bound on the target part `s`.
    pub lower: f64,
    /// Upper bound per part.
    pub upper: Vec<f64>,
    pub violations: Vec<String>,
}

impl BoundsReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `p_s ≥ Tr(ρ̃_s)·F` and `p_i ≤ δ_is Tr(ρ̃_s)·F + δ_i0 Tr(ρ̃₀)·F` with `F = c·det X/N!`,
/// `s` the 1-based index of the data state.
pub fn bounds_check(program: &MixedProgram, s: usize, probabilities: &PartProbabilities) -> Result<BoundsReport> {
    let n = program.parts.len() - 1;
    if s == 0 || s > n {
        return Err(Error::IndexOutOfRange { index: s, len: n });
    }
    let det = program.gram_determinant();
    let factor = probabilities.constant * det / factorial(program.total());
    let lower = program.parts[s].total_weight() * factor;
    let upper: Vec<f64> = (0..=n)
        .map(|i| match i {
            0 => program.parts[0].total_weight() * factor,
            i if i == s => lower,
            _ => 0.0,
        })
        .collect();
    let mut violations = Vec::new();
    if probabilities.parts[s] < lower - EIGEN_TOL {
        violations.push(format!("part {s}: {} below lower bound {lower}", probabilities.parts[s]));
    }
    for (i, (&p, &u)) in probabilities.parts.iter().zip(&upper).enumerate() {
        if p > u + EIGEN_TOL {
            violations.push(format!("part {i}: {p} above upper bound {u}"));
        }
    }
    Ok(BoundsReport { factor, gram_determinant: det, lower, upper, violations })
}

/// Whether the target part has positive probability for every data state.
pub fn all_targets_positive(program: &MixedProgram, rhos: &[DensityOperator], cap: Cap) -> Result<bool> {
    for (s, rho) in rhos.iter().enumerate() {
        if part_probabilities(program, rho, cap)?.parts[s + 1] <= POSITIVE_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
