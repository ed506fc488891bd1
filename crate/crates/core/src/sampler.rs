//! Outcome distributions and reproducible simulated measurement records.
//!
//! Shots are drawn by inverse-CDF lookup from `ChaCha20Rng::seed_from_u64(seed)`
//! (crate `rand_chacha` 0.9), one `f64` in `[0, 1)` per shot from
//! `Rng::random::<f64>()`. Equal `(distribution, shots, seed)` give equal counts.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::discriminator::{Povm, ProgramInput};
use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, HermitianOperator};
use crate::mixed::PartProbabilities;

/// Negative probabilities down to this are rounding and become 0.
pub const CLAMP_TOL: f64 = 1e-12;
/// Allowed deviation of the total from 1; the remainder goes to the first label.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeLabel {
    /// POVM outcome `k`; 0 is inconclusive.
    Outcome(usize),
    Inconclusive,
    /// Outcomes grouped by program part.
    Part(usize),
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeLabel::Outcome(k) => write!(f, "{k}"),
            OutcomeLabel::Inconclusive => f.write_str("inconclusive"),
            OutcomeLabel::Part(i) => write!(f, "part{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    labels: Vec<OutcomeLabel>,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    /// Clamps entries in `[−CLAMP_TOL, 0)` to zero and folds a total deviation of
    /// at most `NORMALIZATION_TOL` into the first entry.
    pub fn new(labels: Vec<OutcomeLabel>, probabilities: Vec<f64>) -> Result<Self> {
        if labels.len() != probabilities.len() || labels.is_empty() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probabilities.len()
            )));
        }
        let mut p = probabilities;
        for (k, x) in p.iter_mut().enumerate() {
            if !x.is_finite() || *x < -CLAMP_TOL {
                return Err(Error::InvalidDistribution(format!("probability {x} for {}", labels[k])));
            }
            *x = x.max(0.0);
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        p[0] = (p[0] + 1.0 - total).max(0.0);
        Ok(OutcomeDistribution { labels, probabilities: p })
    }

    /// Labels `0..len` as POVM outcomes.
    pub fn from_outcomes(probabilities: Vec<f64>) -> Result<Self> {
        let labels = (0..probabilities.len()).map(OutcomeLabel::Outcome).collect();
        Self::new(labels, probabilities)
    }

    pub fn labels(&self) -> &[OutcomeLabel] {
        &self.labels
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn cdf(&self) -> Vec<f64> {
        self.probabilities
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

/// What the discriminator measures.
#[derive(Clone, Debug)]
pub enum MeasurementInput {
    /// `|ψ_jⁿ⟩`.
    Pure(ProgramInput),
    /// `|Ψ⟩⟨Ψ| ⊗ ρ`.
    ProgramWithDensity { program: ComplexVector, data: HermitianOperator },
}

/// `p_k = Tr(Π_k ρ_in)` over all outcomes.
pub fn outcome_distribution(povm: &Povm, input: &MeasurementInput) -> Result<OutcomeDistribution> {
    let probabilities = match input {
        MeasurementInput::Pure(pi) => {
            if pi.vector.len() != povm.dim() {
                return Err(Error::LayoutMismatch(format!(
                    "input of length {} for a POVM of dimension {}",
                    pi.vector.len(),
                    povm.dim()
                )));
            }
            povm.elements().iter().map(|e| e.expectation(&pi.vector)).collect()
        }
        MeasurementInput::ProgramWithDensity { program, data } => povm.outcome_probabilities_mixed(program, data)?,
    };
    OutcomeDistribution::from_outcomes(probabilities)
}

/// Inconclusive first, then parts `0..=n`.
pub fn part_distribution(probs: &PartProbabilities) -> Result<OutcomeDistribution> {
    let labels =
        std::iter::once(OutcomeLabel::Inconclusive).chain((0..probs.parts.len()).map(OutcomeLabel::Part)).collect();
    let values = std::iter::once(probs.inconclusive).chain(probs.parts.iter().copied()).collect();
    OutcomeDistribution::new(labels, values)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleRecord {
    pub seed: u64,
    pub shots: u64,
    pub labels: Vec<OutcomeLabel>,
    pub counts: Vec<u64>,
}

impl SampleRecord {
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.shots as f64).collect()
    }
}

pub fn sample(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Result<SampleRecord> {
    if shots == 0 {
        return Err(Error::InvalidInput("need at least one shot".into()));
    }
    let cdf = dist.cdf();
    // a draw at or above the rounded total lands on the last reachable outcome
    let last = dist.probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf.iter().position(|&c| u < c).unwrap_or(last);
        counts[k] += 1;
    }
    Ok(SampleRecord { seed, shots, labels: dist.labels.clone(), counts })
}

/// `√(p(1 − p)/shots)`.
pub fn standard_error(p: f64, shots: u64) -> f64 {
    (p * (1.0 - p) / shots as f64).max(0.0).sqrt()
}
