use super::Povm;
use crate::antisym::Permutation;
use crate::error::Result;
use crate::linalg::{conjugate_factor, partial_trace, permute_operator, ComplexMatrix};
use crate::random::{haar_unitary, rng};
use crate::tol::Tolerances;

/// Residuals of the symmetry properties an optimal structured POVM must have.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceReport {
    pub trials: usize,
    pub seed: u64,
    /// Worst `‖U^{⊗(n+1)} Π_k U†^{⊗(n+1)} − Π_k‖_max` over trials and elements.
    pub unitary_residual: f64,
    /// Worst `‖P_σ† Π_i P_σ − Π_{σ(i)}‖_max` over `σ ∈ S(n)` (data register fixed).
    pub permutation_residual: f64,
    /// `c_i = Tr(Π_i)/m` from `Tr_ī(Π_i) ≈ c_i I`.
    pub marginal_constants: Vec<f64>,
    /// Worst `‖Tr_ī(Π_i) − c I‖_max`, with `c` the mean of the `c_i`.
    pub marginal_residual: f64,
    pub unitary_pass: bool,
    pub permutation_pass: bool,
    pub marginal_pass: bool,
}

impl CovarianceReport {
    pub fn pass(&self) -> bool {
        self.unitary_pass && self.permutation_pass && self.marginal_pass
    }
}

pub fn check_covariance(povm: &Povm, trials: usize, seed: u64, tol: &Tolerances) -> Result<CovarianceReport> {
    let (m, n) = (povm.m(), povm.n());
    let layout = povm.layout();

    let mut r = rng(seed);
    let mut unitary_residual: f64 = 0.0;
    for _ in 0..trials {
        let u = haar_unitary(m, &mut r);
        for element in povm.elements() {
            let mut rotated = element.matrix().clone();
            for factor in 0..=n {
                rotated = conjugate_factor(&rotated, layout, factor, &u)?;
            }
            unitary_residual = unitary_residual.max(rotated.max_abs_diff(element.matrix()));
        }
    }

    let mut permutation_residual: f64 = 0.0;
    for sigma in Permutation::all(n) {
        let inverse = sigma.extended(1).inverse();
        for (k, element) in povm.elements().iter().enumerate() {
            let (conjugated, _) = permute_operator(element.matrix(), layout, inverse.images())?;
            let target = if k == 0 { 0 } else { sigma.image(k - 1) + 1 };
            permutation_residual = permutation_residual.max(conjugated.max_abs_diff(povm.element(target).matrix()));
        }
    }

    let marginals = (1..=n)
        .map(|i| {
            let others: Vec<usize> = (0..=n).filter(|&f| f != i - 1).collect();
            partial_trace(povm.element(i), layout, &others)
        })
        .collect::<Result<Vec<_>>>()?;
    let marginal_constants: Vec<f64> = marginals.iter().map(|t| t.trace() / m as f64).collect();
    let mean = marginal_constants.iter().sum::<f64>() / n as f64;
    let scalar = ComplexMatrix::identity(m).scale(mean);
    let marginal_residual = marginals.iter().map(|t| t.matrix().max_abs_diff(&scalar)).fold(0.0, f64::max);

    Ok(CovarianceReport {
        trials,
        seed,
        unitary_pass: unitary_residual <= tol.unitary_covariance,
        permutation_pass: permutation_residual <= tol.permutation_covariance,
        marginal_pass: marginal_residual <= tol.marginal,
        unitary_residual,
        permutation_residual,
        marginal_constants,
        marginal_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antisym::antisym_projector;
    use crate::discriminator::{build_optimal_equal, build_universal, register_projectors};
    use crate::linalg::HermitianOperator;
    use crate::tol::Cap;

    #[test]
    fn universal_is_covariant() {
        let povm = build_universal(3, 2, Cap::default()).unwrap();
        let report = check_covariance(&povm, 5, 11, &Tolerances::default()).unwrap();
        assert!(report.pass(), "{report:?}");
    }

    #[test]
    fn optimal_three_has_equal_marginal_constants() {
        let povm = build_optimal_equal(3, Cap::default()).unwrap();
        let report = check_covariance(&povm, 3, 12, &Tolerances::default()).unwrap();
        assert!(report.pass(), "{report:?}");
        // Tr_ī(c I ⊗ Φ(3)) = c · C(3,3) · I with c = 3/4
        for c in &report.marginal_constants {
            assert!((c - 0.75).abs() < 1e-10);
        }
    }

    #[test]
    fn unequal_constants_break_permutation_covariance() {
        let phi = antisym_projector(3, 2, Cap::default()).unwrap();
        let proj = register_projectors(&phi, Cap::default()).unwrap();
        let p1 = HermitianOperator::new(proj[0].scale(0.5)).unwrap();
        let p2 = HermitianOperator::new(proj[1].scale(0.3)).unwrap();
        let p0 = HermitianOperator::identity(27).sub(&p1).sub(&p2);
        let povm = Povm::new(3, 2, vec![p0, p1, p2]).unwrap();
        let report = check_covariance(&povm, 2, 13, &Tolerances::default()).unwrap();
        assert!(report.unitary_pass);
        assert!(!report.permutation_pass);
        assert!(!report.marginal_pass);
        assert!(report.permutation_residual > 0.05);
    }
}
