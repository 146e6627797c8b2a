//! Finite metric spaces and the combinatorial structures built on them.

mod group;
mod rips;
mod space;

pub use group::{word_metric, word_metric_right, ActionFile, FiniteGroup, GroupAction};
pub use rips::{rips, rips_inclusion, rips_with_max_dim, RipsComplex, RipsPoint, DEFAULT_MAX_DIM};
pub use space::{bounded_geometry_profile, graph_space, validate_space, FiniteMetricSpace, SpaceFile};

use crate::Rat;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpaceError {
    #[error("distance table is not square or does not match the {0} labels")]
    ShapeMismatch(usize),
    #[error("distance table is not symmetric at ({0}, {1})")]
    AsymmetricTable(usize, usize),
    #[error("zero distance between distinct points {0} and {1}")]
    ZeroOffDiagonal(usize, usize),
    #[error("nonzero diagonal entry at point {0}")]
    NonzeroDiagonal(usize),
    #[error("negative distance between {0} and {1}")]
    NegativeDistance(usize, usize),
    #[error("triangle inequality fails: d({x},{z}) > d({x},{y}) + d({y},{z})")]
    TriangleViolation { x: usize, y: usize, z: usize },
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("target scale {to} is below source scale {from}")]
    ScaleDecrease { from: Rat, to: Rat },
    #[error("negative scale")]
    NegativeScale,
    #[error("weights must be non-negative and sum to exactly one")]
    BadWeights,
    #[error("support of the point is not a simplex at scale {0}")]
    NotASimplex(Rat),
    #[error("point index {0} out of range")]
    PointOutOfRange(usize),
    #[error("invalid Cayley table: {0}")]
    InvalidGroup(String),
    #[error("generating set does not generate the group")]
    NotGenerating,
    #[error("generating set is not closed under inverses")]
    NotSymmetric,
    #[error("invalid action: {0}")]
    InvalidAction(String),
}
