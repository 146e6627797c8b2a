use std::sync::Arc;

use num_traits::Zero;

use super::eig::{hermitian_eig, self_adjoint_defect};
use super::MatrixError;
use crate::coarse_space::FiniteMetricSpace;
use crate::{CMat, Rat, C64};

/// Blocks whose largest entry modulus is at most this value count as zero
/// when computing propagation.
pub const ZERO_TOL: f64 = 1e-14;

/// A complex block matrix over a finite metric space with its exact
/// propagation.
#[derive(Debug, Clone)]
pub struct FilteredMatrix {
    space: Arc<FiniteMetricSpace>,
    fiber_dim: usize,
    entries: CMat,
    propagation: Rat,
}

impl PartialEq for FilteredMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.fiber_dim == other.fiber_dim && *self.space == *other.space && self.entries == other.entries
    }
}

impl FilteredMatrix {
    pub fn new(space: Arc<FiniteMetricSpace>, fiber_dim: usize, entries: CMat) -> Result<Self, MatrixError> {
        let dim = space.len() * fiber_dim;
        if fiber_dim == 0 || entries.nrows() != dim || entries.ncols() != dim {
            return Err(MatrixError::ShapeMismatch);
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        let propagation = compute_propagation(&space, fiber_dim, &entries);
        Ok(Self { space, fiber_dim, entries, propagation })
    }

    pub fn zeros(space: Arc<FiniteMetricSpace>, fiber_dim: usize) -> Self {
        let d = space.len() * fiber_dim;
        Self { space, fiber_dim, entries: CMat::zeros(d, d), propagation: Rat::zero() }
    }

    pub fn identity(space: Arc<FiniteMetricSpace>, fiber_dim: usize) -> Self {
        let d = space.len() * fiber_dim;
        Self { space, fiber_dim, entries: CMat::identity(d, d), propagation: Rat::zero() }
    }

    /// `e_{x,y}` tensored with the fiber matrix unit `E_{f,g}`.
    pub fn matrix_unit(
        space: Arc<FiniteMetricSpace>,
        fiber_dim: usize,
        x: usize,
        y: usize,
        f: usize,
        g: usize,
    ) -> Self {
        let d = space.len() * fiber_dim;
        let mut entries = CMat::zeros(d, d);
        entries[(x * fiber_dim + f, y * fiber_dim + g)] = C64::new(1.0, 0.0);
        Self::new(space, fiber_dim, entries).expect("in-range unit")
    }

    /// Real diagonal matrix.
    pub fn diagonal(space: Arc<FiniteMetricSpace>, fiber_dim: usize, diag: &[f64]) -> Result<Self, MatrixError> {
        let d = space.len() * fiber_dim;
        if diag.len() != d {
            return Err(MatrixError::BadEntries { expected: d, got: diag.len() });
        }
        let mut entries = CMat::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            entries[(i, i)] = C64::new(v, 0.0);
        }
        Self::new(space, fiber_dim, entries)
    }

    pub fn space(&self) -> &FiniteMetricSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn into_entries(self) -> CMat {
        self.entries
    }

    /// Exact propagation of the numerically nonzero block pattern.
    pub fn propagation(&self) -> Rat {
        self.propagation
    }

    /// Same space and fiber, new entries.
    pub fn with_entries(&self, entries: CMat) -> Result<Self, MatrixError> {
        Self::new(self.space.clone(), self.fiber_dim, entries)
    }

    pub fn block(&self, x: usize, y: usize) -> CMat {
        let m = self.fiber_dim;
        self.entries.view((x * m, y * m), (m, m)).into_owned()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), MatrixError> {
        if self.fiber_dim != other.fiber_dim || !(Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space)
        {
            return Err(MatrixError::ShapeMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_compatible(other)?;
        self.with_entries(&self.entries * &other.entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_compatible(other)?;
        self.with_entries(&self.entries + &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_compatible(other)?;
        self.with_entries(&self.entries - &other.entries)
    }

    pub fn scale(&self, z: C64) -> Self {
        self.with_entries(&self.entries * z).expect("scaling keeps the shape")
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            fiber_dim: self.fiber_dim,
            entries: self.entries.adjoint(),
            propagation: self.propagation,
        }
    }

    /// Largest entry modulus of `T - T*`.
    pub fn self_adjoint_defect(&self) -> f64 {
        self_adjoint_defect(&self.entries)
    }

    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.entries)
    }

    /// Zeroes every block with `d(x, y) > r`.
    pub fn truncate(&self, r: Rat) -> (Self, Truncation) {
        let n = self.space.len();
        let m = self.fiber_dim;
        let mut kept = self.entries.clone();
        let mut block_bound = 0.0;
        for x in 0..n {
            for y in 0..n {
                if self.space.dist(x, y) > r {
                    let mut fro = 0.0;
                    for i in 0..m {
                        for j in 0..m {
                            let z = &mut kept[(x * m + i, y * m + j)];
                            fro += z.norm_sqr();
                            *z = C64::zero();
                        }
                    }
                    block_bound += fro.sqrt();
                }
            }
        }
        let exact = operator_norm(&(&self.entries - &kept));
        let out = self.with_entries(kept).expect("same shape");
        (out, Truncation { block_sum_bound: block_bound, exact_norm: exact })
    }

    /// `diag(self, other)` on the same space with doubled fiber: the first
    /// `m` fiber coordinates over each point carry `self`, the next `m'`
    /// carry `other`.
    pub fn fiber_direct_sum(&self, other: &Self) -> Result<Self, MatrixError> {
        if *self.space != *other.space {
            return Err(MatrixError::ShapeMismatch);
        }
        let n = self.space.len();
        let (m1, m2) = (self.fiber_dim, other.fiber_dim);
        let m = m1 + m2;
        let mut e = CMat::zeros(n * m, n * m);
        for x in 0..n {
            for y in 0..n {
                for i in 0..m1 {
                    for j in 0..m1 {
                        e[(x * m + i, y * m + j)] = self.entries[(x * m1 + i, y * m1 + j)];
                    }
                }
                for i in 0..m2 {
                    for j in 0..m2 {
                        e[(x * m + m1 + i, y * m + m1 + j)] = other.entries[(x * m2 + i, y * m2 + j)];
                    }
                }
            }
        }
        Self::new(self.space.clone(), m, e)
    }

    /// Enlarges the fiber to `new_fiber`, placing the matrix in the first
    /// `m` fiber coordinates over each point and `fill` on the diagonal of
    /// the remaining ones.
    pub fn pad_fiber(&self, new_fiber: usize, fill: C64) -> Result<Self, MatrixError> {
        if new_fiber < self.fiber_dim {
            return Err(MatrixError::ShapeMismatch);
        }
        if new_fiber == self.fiber_dim {
            return Ok(self.clone());
        }
        let filler = FilteredMatrix::identity(self.space.clone(), new_fiber - self.fiber_dim).scale(fill);
        self.fiber_direct_sum(&filler)
    }
}

/// Both bounds on the norm of the discarded part of a truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Sum of Frobenius norms of the removed blocks.
    pub block_sum_bound: f64,
    /// Spectral norm of the removed part.
    pub exact_norm: f64,
}

/// Spectral norm via the largest eigenvalue of `T* T`.
pub fn operator_norm(t: &CMat) -> f64 {
    if t.is_empty() {
        return 0.0;
    }
    let gram = t.adjoint() * t;
    match hermitian_eig(&gram) {
        Ok(e) => e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}

fn compute_propagation(space: &FiniteMetricSpace, m: usize, e: &CMat) -> Rat {
    let n = space.len();
    let mut prop = Rat::zero();
    for x in 0..n {
        for y in 0..n {
            let d = space.dist(x, y);
            if d <= prop {
                continue;
            }
            let nonzero = (0..m).any(|i| (0..m).any(|j| e[(x * m + i, y * m + j)].norm() > ZERO_TOL));
            if nonzero {
                prop = d;
            }
        }
    }
    prop
}
