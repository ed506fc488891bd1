use super::{Povm, PovmCheck};
use crate::antisym::antisym_projector;
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, HermitianOperator};
use crate::tol::{Cap, Tolerances};

/// Unambiguity verdict together with the POVM residuals it rests on.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// `‖(I − Φ)·Tr_i(Π_i)·(I − Φ)‖_max` for `i = 1..n`.
    pub leakages: Vec<f64>,
    pub povm: PovmCheck,
    pub tolerances: Tolerances,
    pub unambiguous: bool,
    pub pass: bool,
}

impl VerificationReport {
    pub fn max_leakage(&self) -> f64 {
        self.leakages.iter().copied().fold(0.0, f64::max)
    }
}

/// Support leakage of each `Tr_i(Π_i)` outside the antisymmetric subspace of
/// the remaining `n` factors. Never fails on an invalid POVM; the verdict
/// records it instead.
pub fn unambiguity_report(povm: &Povm, tol: &Tolerances, cap: Cap) -> Result<VerificationReport> {
    let (m, n) = (povm.m(), povm.n());
    let phi = antisym_projector(m, n, cap)?;
    let outside = HermitianOperator::identity(phi.operator().dim()).sub(phi.operator());
    let leakages = (1..=n)
        .map(|i| {
            let reduced = partial_trace(povm.element(i), povm.layout(), &[i - 1])?;
            Ok(reduced.conjugate_by(outside.matrix()).matrix().max_abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let check = povm.check(tol);
    let unambiguous = leakages.iter().all(|&l| l <= tol.leakage);
    Ok(VerificationReport { pass: unambiguous && check.valid, leakages, povm: check, tolerances: *tol, unambiguous })
}

/// Like [`unambiguity_report`], but rejects measurements that are not POVMs.
pub fn verify_unambiguous(povm: &Povm, tol: &Tolerances, cap: Cap) -> Result<VerificationReport> {
    let report = unambiguity_report(povm, tol, cap)?;
    if !report.povm.valid {
        let worst_psd = report.povm.psd_residuals.iter().copied().fold(0.0, f64::max);
        return Err(Error::InvalidPovm(format!(
            "psd residual {worst_psd:.3e}, completeness residual {:.3e}",
            report.povm.completeness_residual
        )));
    }
    Ok(report)
}
