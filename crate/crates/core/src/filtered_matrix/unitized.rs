use super::{FilteredMatrix, MatrixError};
use crate::{CMat, Rat, C64};

/// An element `(x, lambda)` of the unitization, with product
/// `(x, l)(x', l') = (x x' + l x' + l' x, l l')`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitizedMatrix {
    pub body: FilteredMatrix,
    pub scalar: C64,
}

impl UnitizedMatrix {
    pub fn new(body: FilteredMatrix, scalar: C64) -> Self {
        Self { body, scalar }
    }

    /// The unit `(0, 1)`.
    pub fn one(like: &FilteredMatrix) -> Self {
        Self { body: FilteredMatrix::zeros(like.space_arc().clone(), like.fiber_dim()), scalar: C64::new(1.0, 0.0) }
    }

    /// Splits a matrix `T` as `(T - 1, 1)`, so that `to_matrix` returns `T`.
    pub fn from_matrix(t: &FilteredMatrix) -> Self {
        let id = FilteredMatrix::identity(t.space_arc().clone(), t.fiber_dim());
        Self { body: t.sub(&id).expect("same shape"), scalar: C64::new(1.0, 0.0) }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        let xy = self.body.mul(&other.body)?;
        let body = xy.add(&other.body.scale(self.scalar))?.add(&self.body.scale(other.scalar))?;
        Ok(Self { body, scalar: self.scalar * other.scalar })
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        Ok(Self { body: self.body.add(&other.body)?, scalar: self.scalar + other.scalar })
    }

    pub fn adjoint(&self) -> Self {
        Self { body: self.body.adjoint(), scalar: self.scalar.conj() }
    }

    /// Character `rho(x, lambda) = lambda`.
    pub fn rho(&self) -> C64 {
        self.scalar
    }

    /// Propagation of the body; the scalar part has propagation zero.
    pub fn propagation(&self) -> Rat {
        self.body.propagation()
    }

    /// The operator `x + lambda 1` on the finite-dimensional module.
    pub fn to_matrix(&self) -> FilteredMatrix {
        let d = self.body.dim();
        self.body.with_entries(self.body.entries() + CMat::identity(d, d) * self.scalar).expect("same shape")
    }
}
