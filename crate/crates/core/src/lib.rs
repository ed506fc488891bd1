//! Programmable unambiguous discrimination of unknown pure and mixed states.
//!
//! Tensor factors are ordered big-endian: factor 0 is the slowest-varying
//! index. A discriminator for `n` states of `C^m` acts on `n` program
//! registers followed by one data register.

pub mod antisym;
pub mod discriminator;
pub mod error;
pub mod gram_spectra;
pub mod io;
pub mod linalg;
pub mod mixed;
pub mod random;
pub mod sampler;
pub mod state;
pub mod tol;

pub use antisym::{antisym_projector, wedge, AntisymProjector, IncreasingTuple, Permutation};
pub use discriminator::{
    build_family, build_optimal_equal, build_trivial_antisym, build_universal, check_covariance, efficiency_bounds,
    known_state_optimum, program_input, success_prob_analytic, success_prob_operational, unambiguity_report,
    verify_unambiguous, CovarianceReport, Family, Povm, ProgramInput, Regime, VerificationReport,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, HermitianOperator, Subspace, SubsystemLayout};
pub use mixed::{
    bounds_check, build_program, core_decompose, part_probabilities, CoreDecomposition, DensityOperator, MixedProgram,
};
pub use sampler::{outcome_distribution, sample, MeasurementInput, OutcomeDistribution, SampleRecord};
pub use state::{PureState, StateSet};
pub use tol::{Cap, Tolerances};
