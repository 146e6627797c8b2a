//! Propagation-tracked block matrices over a finite metric space.
//!
//! A [`FilteredMatrix`] on a space with `n` points and fiber dimension `m`
//! is an `(n m) x (n m)` complex matrix whose row/column index `x * m + f`
//! addresses fiber coordinate `f` over point `x`. Its propagation is the
//! largest distance `d(x, y)` over the blocks `(x, y)` that are not
//! numerically zero.

mod eig;
mod fixed_point;
mod matrix;
mod unitized;

pub use eig::{frobenius, hermitian_eig, self_adjoint_defect, HermitianEig, SELF_ADJOINT_TOL};
pub use fixed_point::{action_unitary, fixed_point_project, FiberRep};
pub use matrix::{operator_norm, FilteredMatrix, Truncation, ZERO_TOL};
pub use unitized::UnitizedMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("shapes, spaces or fiber dimensions do not match")]
    ShapeMismatch,
    #[error("matrix is not self-adjoint (defect {0:e})")]
    NotSelfAdjoint(f64),
    #[error("Jacobi iteration did not converge")]
    NoConvergence,
    #[error("group action does not match the matrix space or fiber")]
    ActionSpaceMismatch,
    #[error("fiber representation is not a unitary homomorphism: {0}")]
    BadFiberRep(String),
    #[error("entry array has {got} entries, expected {expected}")]
    BadEntries { expected: usize, got: usize },
    #[error("non-finite matrix entry")]
    NonFinite,
}
