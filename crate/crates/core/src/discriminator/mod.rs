//! Programmable unambiguous discriminators.
//!
//! A discriminator for `n` states of `C^m` acts on `n` program registers and
//! one data register, laid out as `[m; n + 1]`. Outcome `i ≥ 1` claims the
//! data register holds the state loaded in program register `i`; outcome 0
//! is inconclusive. Outcome and state labels are 1-based, tensor factor
//! indices 0-based (register `i` is factor `i - 1`).
//!
//! The structured family is `Π_i = c · I_i ⊗ Φ(n)_ī` with `Π₀ = I − Σ Π_i`.
//! `c = n/(n+1)` is the largest admissible constant when `m = n`, and
//! `c = 1/n` when `m > n`. For `m > n` the family itself is an assumption:
//! maximality is only established within it, not over all POVMs.

mod covariance;
mod verify;

pub use covariance::{check_covariance, CovarianceReport};
pub use verify::{unambiguity_report, verify_unambiguous, VerificationReport};

use std::fmt;
use std::str::FromStr;

use crate::antisym::{antisym_projector, factorial, AntisymProjector};
use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, kron, kron_vec, permute_operator, ComplexMatrix, ComplexVector, HermitianOperator, SubsystemLayout,
};
use crate::state::StateSet;
use crate::tol::{Cap, Tolerances, DEPENDENCE_TOL};

/// Which closed-form success probability applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `m = n`, `c = n/(n+1)`.
    Equal,
    /// `m > n`, `c = 1/n`.
    Universal,
}

impl Regime {
    pub fn for_dims(m: usize, n: usize) -> Result<Regime> {
        match m.cmp(&n) {
            std::cmp::Ordering::Equal => Ok(Regime::Equal),
            std::cmp::Ordering::Greater => Ok(Regime::Universal),
            std::cmp::Ordering::Less => Err(wrong_regime(m, n, "fewer dimensions than states")),
        }
    }

    /// The largest `c` keeping `Π₀` positive.
    pub fn constant(self, n: usize) -> f64 {
        match self {
            Regime::Equal => n as f64 / (n as f64 + 1.0),
            Regime::Universal => 1.0 / n as f64,
        }
    }
}

/// Which builder produced a POVM.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Optimal,
    Universal,
    Trivial,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "optimal" => Ok(Family::Optimal),
            "universal" => Ok(Family::Universal),
            "trivial" => Ok(Family::Trivial),
            other => Err(Error::InvalidInput(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Optimal => "optimal",
            Family::Universal => "universal",
            Family::Trivial => "trivial",
        })
    }
}

fn wrong_regime(m: usize, n: usize, reason: &str) -> Error {
    Error::WrongRegime { m, n, reason: reason.to_string() }
}

/// Measurement `{Π₀, Π₁, …, Π_n}` on `(C^m)^{⊗(n+1)}`.
///
/// Construction checks shapes and Hermiticity only; positivity and
/// completeness are measured by [`Povm::check`] and enforced by
/// [`verify_unambiguous`].
#[derive(Clone, Debug)]
pub struct Povm {
    m: usize,
    n: usize,
    elements: Vec<HermitianOperator>,
    layout: SubsystemLayout,
    constant: Option<f64>,
}

/// Positivity and completeness residuals of a POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmCheck {
    /// `max(0, −λ_min(Π_k))` per element.
    pub psd_residuals: Vec<f64>,
    /// `‖Σ Π_k − I‖_max`.
    pub completeness_residual: f64,
    pub valid: bool,
}

impl Povm {
    pub fn new(m: usize, n: usize, elements: Vec<HermitianOperator>) -> Result<Povm> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidPovm(format!("need m, n ≥ 1, got m = {m}, n = {n}")));
        }
        if elements.len() != n + 1 {
            return Err(Error::InvalidPovm(format!("expected {} elements, got {}", n + 1, elements.len())));
        }
        let layout = SubsystemLayout::uniform(m, n + 1);
        if let Some(bad) = elements.iter().find(|e| e.dim() != layout.dim()) {
            return Err(Error::InvalidPovm(format!(
                "element of dimension {} on a space of dimension {}",
                bad.dim(),
                layout.dim()
            )));
        }
        Ok(Povm { m, n, elements, layout, constant: None })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension `m^(n+1)`.
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &HermitianOperator {
        &self.elements[k]
    }

    /// The constant `c` the builder used, if any.
    pub fn constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn check(&self, tol: &Tolerances) -> PovmCheck {
        let psd_residuals: Vec<f64> = self.elements.iter().map(|e| (-e.min_eigenvalue()).max(0.0)).collect();
        let total = self.elements.iter().skip(1).fold(self.elements[0].clone(), |acc, e| acc.add(e));
        let completeness_residual = total.max_abs_diff(&HermitianOperator::identity(self.dim()));
        let valid = psd_residuals.iter().all(|&r| r <= tol.psd) && completeness_residual <= tol.completeness;
        PovmCheck { psd_residuals, completeness_residual, valid }
    }

    fn ensure_compatible(&self, states: &StateSet) -> Result<()> {
        if states.dim() != self.m || states.len() != self.n {
            return Err(Error::LayoutMismatch(format!(
                "POVM for {} states of dimension {}, got {} states of dimension {}",
                self.n,
                self.m,
                states.len(),
                states.dim()
            )));
        }
        Ok(())
    }

    /// `⟨ψ_jⁿ|Π_k|ψ_jⁿ⟩`: probability of outcome `k` when the data register holds state `j`.
    pub fn outcome_probability(&self, states: &StateSet, outcome: usize, data_index: usize) -> Result<f64> {
        self.ensure_compatible(states)?;
        if outcome > self.n {
            return Err(Error::IndexOutOfRange { index: outcome, len: self.n });
        }
        let input = program_input(states, data_index)?;
        Ok(self.elements[outcome].expectation(&input.vector))
    }

    /// `Tr(Π_k |Ψ⟩⟨Ψ| ⊗ ρ)` for every outcome `k`, where `|Ψ⟩` fills the
    /// program registers and `ρ` the data register.
    pub fn outcome_probabilities_mixed(&self, program: &ComplexVector, data: &HermitianOperator) -> Result<Vec<f64>> {
        let m = self.m;
        if data.dim() != m || program.len() * m != self.dim() {
            return Err(Error::LayoutMismatch(format!(
                "program of length {} and data of dimension {} on a space of dimension {}",
                program.len(),
                data.dim(),
                self.dim()
            )));
        }
        let inputs: Vec<ComplexVector> = (0..m).map(|a| kron_vec(program, &basis_vector(m, a))).collect();
        let rho = data.matrix();
        Ok(self
            .elements
            .iter()
            .map(|element| {
                let images: Vec<ComplexVector> = inputs.iter().map(|v| element.matrix().apply(v)).collect();
                let mut p = 0.0;
                for a in 0..m {
                    for b in 0..m {
                        // Σ ρ_ab ⟨Ψ,b|Π|Ψ,a⟩
                        p += (rho[(a, b)] * inputs[b].dotc(&images[a])).re;
                    }
                }
                p
            })
            .collect())
    }
}

/// `|ψ_jⁿ⟩ = |ψ₁⟩…|ψ_n⟩|ψ_j⟩`.
#[derive(Clone, Debug)]
pub struct ProgramInput {
    pub states: StateSet,
    /// 1-based index of the state loaded into the data register.
    pub data_index: usize,
    pub vector: ComplexVector,
}

pub fn program_input(states: &StateSet, j: usize) -> Result<ProgramInput> {
    if j == 0 || j > states.len() {
        return Err(Error::IndexOutOfRange { index: j, len: states.len() });
    }
    let vector = kron_vec(&states.product_vector(), states.states()[j - 1].vector());
    Ok(ProgramInput { states: states.clone(), data_index: j, vector })
}

/// `I_i ⊗ Φ(n)_ī` for every register `i = 1..n`: identity on register `i`,
/// the antisymmetric projector on the remaining `n` factors in ascending order.
///
/// Built as `I ⊗ Φ(n)` and routed by a factor permutation that moves the
/// identity factor to position `i − 1`.
pub fn register_projectors(phi: &AntisymProjector, cap: Cap) -> Result<Vec<ComplexMatrix>> {
    let (m, n) = (phi.m(), phi.n());
    cap.check_power(m, n + 1)?;
    let layout = SubsystemLayout::uniform(m, n + 1);
    let base = kron(&ComplexMatrix::identity(m), phi.operator().matrix(), cap)?;
    (0..n)
        .map(|i| {
            let images: Vec<usize> = (1..=i).chain(std::iter::once(0)).chain(i + 1..=n).collect();
            permute_operator(&base, &layout, &images).map(|(op, _)| op)
        })
        .collect()
}

/// `I − c Σ_i I_i ⊗ Φ(n)_ī`.
pub fn inconclusive_element(m: usize, n: usize, c: f64, cap: Cap) -> Result<HermitianOperator> {
    let phi = antisym_projector(m, n, cap)?;
    let projectors = register_projectors(&phi, cap)?;
    Ok(inconclusive_from(&projectors, c, m.pow(n as u32 + 1)))
}

fn inconclusive_from(projectors: &[ComplexMatrix], c: f64, dim: usize) -> HermitianOperator {
    let sum = projectors.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, p| &acc + p);
    HermitianOperator::symmetrized(&ComplexMatrix::identity(dim) - &sum.scale(c))
}

/// `Π_i = c · I_i ⊗ Φ(n)_ī`, `Π₀ = I − Σ Π_i`, for any `c` and `n ≥ 1`.
pub(crate) fn build_structured(m: usize, n: usize, c: f64, cap: Cap) -> Result<Povm> {
    let phi = antisym_projector(m, n, cap)?;
    let projectors = register_projectors(&phi, cap)?;
    let dim = m.pow(n as u32 + 1);
    let mut elements = Vec::with_capacity(n + 1);
    elements.push(inconclusive_from(&projectors, c, dim));
    elements.extend(projectors.iter().map(|p| HermitianOperator::symmetrized(p.scale(c))));
    let mut povm = Povm::new(m, n, elements)?;
    povm.constant = Some(c);
    Ok(povm)
}

/// Optimal discriminator for `n` states in an `n`-dimensional space, `c = n/(n+1)`.
pub fn build_optimal_equal(n: usize, cap: Cap) -> Result<Povm> {
    if n < 2 {
        return Err(wrong_regime(n, n, "the equal-dimension discriminator needs n ≥ 2"));
    }
    build_structured(n, n, Regime::Equal.constant(n), cap)
}

/// Universal discriminator for `n` states in `C^m`, `m > n`, with `c = 1/n`.
pub fn build_universal(m: usize, n: usize, cap: Cap) -> Result<Povm> {
    if n < 2 {
        return Err(wrong_regime(m, n, "the universal discriminator needs n ≥ 2"));
    }
    if m <= n {
        return Err(wrong_regime(m, n, "the universal discriminator needs m > n; use the optimal m = n family"));
    }
    build_structured(m, n, Regime::Universal.constant(n), cap)
}

/// `Π_i = Φ(n+1)/n` for every `i ≥ 1`: unambiguous, but never succeeds.
///
/// When `m ≤ n` the projector `Φ(n+1)` vanishes and `Π₀ = I`.
pub fn build_trivial_antisym(m: usize, n: usize, cap: Cap) -> Result<Povm> {
    if m == 0 || n == 0 {
        return Err(wrong_regime(m, n, "need m, n ≥ 1"));
    }
    let phi = antisym_projector(m, n + 1, cap)?.into_operator();
    let share = phi.scale(1.0 / n as f64);
    let dim = phi.dim();
    let mut elements = vec![HermitianOperator::identity(dim).sub(&phi)];
    elements.extend(std::iter::repeat_n(share, n));
    let mut povm = Povm::new(m, n, elements)?;
    povm.constant = Some(1.0 / n as f64);
    Ok(povm)
}

/// Builds the requested family; `optimal` requires `m = n`.
pub fn build_family(family: Family, m: usize, n: usize, cap: Cap) -> Result<Povm> {
    match family {
        Family::Optimal if m != n => Err(wrong_regime(m, n, "the optimal family needs m = n")),
        Family::Optimal => build_optimal_equal(n, cap),
        Family::Universal => build_universal(m, n, cap),
        Family::Trivial => build_trivial_antisym(m, n, cap),
    }
}

/// `n·det X/(n+1)!` (equal regime) or `det X/(n·n!)` (universal regime).
/// Linearly dependent sets give exactly 0.
pub fn success_prob_analytic(states: &StateSet, regime: Regime) -> f64 {
    let n = states.len();
    let det = states.gram_determinant();
    if det <= DEPENDENCE_TOL {
        return 0.0;
    }
    regime.constant(n) * det / factorial(n)
}

/// `⟨ψ_iⁿ|Π_i|ψ_iⁿ⟩`.
pub fn success_prob_operational(povm: &Povm, states: &StateSet, i: usize) -> Result<f64> {
    if i == 0 || i > states.len() {
        return Err(Error::IndexOutOfRange { index: i, len: states.len() });
    }
    povm.outcome_probability(states, i, i)
}

/// Minimax optimum when the states are known: the smallest Gram eigenvalue.
pub fn known_state_optimum(states: &StateSet) -> f64 {
    let x = HermitianOperator::symmetrized(states.gram());
    x.min_eigenvalue().clamp(0.0, 1.0)
}

/// `(p_sⁿ/(n·n!), p_s/(n·n!))`, the envelope of the universal success probability.
pub fn efficiency_bounds(p_s: f64, n: usize) -> (f64, f64) {
    debug_assert!((0.0..=1.0).contains(&p_s), "p_s = {p_s} outside [0, 1]");
    let scale = n as f64 * factorial(n);
    (p_s.powi(n as i32) / scale, p_s / scale)
}
