//! Numerical tolerances and the dense-storage budget.

use crate::error::{Error, Result};

/// Hermiticity residual, relative to `max(1, ‖A‖_max)`.
pub const HERM_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of a PSD operator, relative to `max(1, λ_max)`.
pub const PSD_TOL: f64 = 1e-9;
/// Eigenvalues above `SUPPORT_TOL · λ_max` belong to the support.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Absolute floor under which an operator is treated as zero.
pub const ZERO_FLOOR: f64 = 1e-14;
/// Identities that hold exactly by construction.
pub const EXACT_TOL: f64 = 1e-10;
/// Checks that go through an eigensolver.
pub const EIGEN_TOL: f64 = 1e-9;
/// Gram determinants at or below this are treated as linear dependence.
pub const DEPENDENCE_TOL: f64 = 1e-12;

/// Default dense budget: 2^24 complex entries (a 4096 × 4096 matrix).
pub const DEFAULT_CAP: usize = 1 << 24;

/// Upper bound on the number of complex entries of any dense matrix we build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cap(pub usize);

impl Default for Cap {
    fn default() -> Self {
        Cap(DEFAULT_CAP)
    }
}

impl Cap {
    /// Fails unless a `dim × dim` dense matrix fits the budget.
    pub fn check_square(self, dim: usize) -> Result<()> {
        let entries = (dim as u128) * (dim as u128);
        if entries > self.0 as u128 {
            return Err(Error::CapExceeded { dim, entries, cap: self.0 });
        }
        Ok(())
    }

    /// `base^exp` as a vector length, checked against the budget.
    pub fn check_vector_power(self, base: usize, exp: usize) -> Result<usize> {
        let mut len: u128 = 1;
        for _ in 0..exp {
            len = len.saturating_mul(base as u128);
            if len > self.0 as u128 {
                return Err(Error::CapExceeded {
                    dim: usize::try_from(len).unwrap_or(usize::MAX),
                    entries: len,
                    cap: self.0,
                });
            }
        }
        Ok(len as usize)
    }

    /// `base^exp` as a dimension, checked against the budget for a square matrix.
    pub fn check_power(self, base: usize, exp: usize) -> Result<usize> {
        let mut dim: u128 = 1;
        for _ in 0..exp {
            dim = dim.saturating_mul(base as u128);
            if dim * dim > self.0 as u128 {
                return Err(Error::CapExceeded {
                    dim: usize::try_from(dim).unwrap_or(usize::MAX),
                    entries: dim.saturating_mul(dim),
                    cap: self.0,
                });
            }
        }
        Ok(dim as usize)
    }
}

/// Pass/fail thresholds used by the verification reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub psd: f64,
    pub completeness: f64,
    pub leakage: f64,
    pub unitary_covariance: f64,
    pub permutation_covariance: f64,
    pub marginal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            psd: PSD_TOL,
            completeness: EIGEN_TOL,
            leakage: EIGEN_TOL,
            unitary_covariance: EIGEN_TOL,
            permutation_covariance: EXACT_TOL,
            marginal: EIGEN_TOL,
        }
    }
}
