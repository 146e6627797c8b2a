//! Sampled homotopies with certified interpolation bounds.
//!
//! A continuous path is replaced by samples `x_0, ..., x_N`. Between two
//! samples the path is the straight segment `x_k + t (x_{k+1} - x_k)`; with
//! `delta` the largest step norm and `M` the largest sample norm, every
//! interpolated point has defect at most
//!
//! ```text
//! eps_eff = max_k defect_k + delta (2M + 1) + delta^2
//! ```
//!
//! which is what a certificate reports and checks.

mod certificate;
mod connect;
mod persistence;
mod rotation;

pub use certificate::{certify, certify_with_slack, interpolation_bound, HomotopyCertificate, PathKind, SampleMetrics};
pub use connect::{connect_projections, direct_rotation, ConnectOptions, DirectRotation};
pub use persistence::{persistence_radius, CellVerdict, PersistenceCell, PersistenceProfile, ProfileOptions};
pub use rotation::rotation_homotopy;

use crate::filtered_matrix::MatrixError;
use crate::quant_k::QuantError;
use crate::Rat;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomotopyError {
    #[error("a path needs at least two samples")]
    TooFewSamples,
    #[error("samples do not share one space and fiber")]
    ShapeMismatch,
    #[error("sample {index} is not self-adjoint")]
    SampleNotSelfAdjoint { index: usize },
    #[error("sample {index} has defect {defect} >= {eps}")]
    SampleDefect { index: usize, defect: f64, eps: f64 },
    #[error("sample {index} has propagation {propagation} > {r}")]
    SamplePropagation { index: usize, propagation: Rat, r: Rat },
    #[error("rotation homotopy needs at least 8 steps, got {0}")]
    TooFewSteps(usize),
    #[error("kappa0 ranks differ: {source_rank} vs {target_rank}")]
    RankMismatch { source_rank: usize, target_rank: usize },
    #[error("no certificate within budget; best path reached eps {achieved_eps} at propagation {achieved_r}")]
    BudgetInfeasible { achieved_eps: f64, achieved_r: Rat, discarded_norm: f64 },
    #[error("sample refinement limit reached before the interpolation bound dropped below eps'")]
    RefinementLimit { eps_eff: f64 },
    #[error("class is not null at the rank level: rank kappa0(p) = {rank}, l = {l}")]
    NotNullInK0 { rank: usize, l: usize },
    #[error("persistence profiles need a degree-0 class")]
    WrongDegree,
    #[error("grid schedule must be non-empty and strictly ascending")]
    InvalidSchedule,
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
