//! Explicit finite-propagation projections built from Rips coordinates, and
//! the degree-0 probes of the quantitative injectivity/surjectivity
//! statements.

mod probes;
mod projections;

pub use probes::{qi_probe, qs_probe, MergeCriterion, PairVerdict, QiReport, QsCell, QsReport, SCOPE_NOTE};
pub use projections::{
    default_group_sample, eval_assembly_class, group_projection, group_projection_at, group_space, invariance_defect,
    mishchenko_px, roe_projection, SampledFunctionMatrix,
};

use crate::coarse_space::SpaceError;
use crate::filtered_matrix::MatrixError;
use crate::homotopy::HomotopyError;
use crate::quant_k::QuantError;
use crate::Rat;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssemblyError {
    #[error("sample {0} is not supported on a simplex of the complex")]
    UnsupportedSample(usize),
    #[error("scale {0} is too small: the construction needs d >= 1")]
    ScaleTooSmall(Rat),
    #[error("fiber vector has norm {0}, expected 1")]
    NonUnitVector(f64),
    #[error("the action does not act on this space")]
    ActionMismatch,
    #[error("equivariance fails with residual {0}")]
    EquivarianceFailed(f64),
    #[error("sample index {0} out of range")]
    SampleOutOfRange(usize),
    #[error("evaluation radius {r} is below the scale {s}")]
    RadiusBelowScale { r: Rat, s: Rat },
    #[error("schedule must be non-empty and strictly ascending")]
    InvalidSchedule,
    #[error("target projection lives on a different space")]
    SpaceMismatch,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}
