//! Almost projections and almost unitaries, spectral rounding, class
//! representatives and control pairs.

mod class;
mod control;
mod kappa;
mod quasi;

pub use class::{standard_trivial, ClassRep, QuantClass, SumLayout};
pub use control::{compose_control_pairs, ControlPair};
pub use kappa::{forbidden_halfwidth, kappa0, Kappa0};
pub use quasi::{
    check_quasi_projection, check_quasi_unitary, hermitian_norm, projection_defect, unitary_defects, QuasiProjection,
    QuasiUnitary, SELF_ADJOINT_ABS_TOL,
};

use crate::filtered_matrix::MatrixError;
use crate::Rat;

/// Eigenvalues closer than this to the edge of the forbidden interval
/// around 1/2 are still accepted by [`kappa0`].
pub const GAP_BOUNDARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantError {
    #[error("eps must lie in (0, 1/4), got {0}")]
    InvalidEps(f64),
    #[error("matrix is not self-adjoint (defect {0:e})")]
    NotSelfAdjoint(f64),
    #[error("defect {0} is not below eps")]
    DefectTooLarge(f64),
    #[error("propagation {0} exceeds r")]
    PropagationTooLarge(Rat),
    #[error("eigenvalue {eigenvalue} lies in the forbidden interval around 1/2 (half-width {halfwidth})")]
    GapViolated { eigenvalue: f64, halfwidth: f64 },
    #[error("relaxation may not tighten (eps, r)")]
    IllegalTightening,
    #[error("classes have different degrees")]
    DegreeMismatch,
    #[error("classes have different (eps, r); relax them first")]
    ParameterMismatch,
    #[error("target fiber is smaller than the current fiber")]
    FiberShrink,
    #[error("rank of kappa0 of the scalar part is {rank}, expected l = {l}")]
    ScalarRankMismatch { rank: usize, l: usize },
    #[error("invalid control pair: {0}")]
    InvalidControlPair(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

pub(crate) fn check_eps(eps: f64) -> Result<(), QuantError> {
    if eps > 0.0 && eps < 0.25 {
        Ok(())
    } else {
        Err(QuantError::InvalidEps(eps))
    }
}
