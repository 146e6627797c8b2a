use std::sync::Arc;

use super::quasi::{check_quasi_projection, check_quasi_unitary, QuasiProjection, QuasiUnitary};
use super::{check_eps, kappa0, QuantError};
use crate::coarse_space::{graph_space, FiniteMetricSpace};
use crate::filtered_matrix::{FilteredMatrix, UnitizedMatrix};
use crate::{CMat, Rat, C64};

/// Representative of a quantitative K-class.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassRep {
    /// `[p, l]` in degree 0.
    Even { p: QuasiProjection, l: usize },
    /// `[u]` in degree 1.
    Odd { u: QuasiUnitary },
}

/// A class representative badged with its control parameters `(eps, r)`.
///
/// Matrices act on the finite module `l2(points) (x) C^m`, where every
/// algebra is unital; `l` counts the rank subtracted from `rank kappa0(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantClass {
    pub rep: ClassRep,
    pub eps: f64,
    pub r: Rat,
}

/// How [`QuantClass::direct_sum`] places the two summands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SumLayout {
    /// Same space, fibers concatenated over every point.
    #[default]
    DoubledFiber,
    /// Graph space of the two underlying spaces.
    DisjointUnion,
}

/// `I_l (+) 0`: the projection onto the first `l` basis vectors in
/// point-major order.
pub fn standard_trivial(space: Arc<FiniteMetricSpace>, fiber_dim: usize, l: usize) -> FilteredMatrix {
    let d = space.len() * fiber_dim;
    let diag: Vec<f64> = (0..d).map(|i| if i < l { 1.0 } else { 0.0 }).collect();
    FilteredMatrix::diagonal(space, fiber_dim, &diag).expect("diagonal of full length")
}

impl QuantClass {
    pub fn even(p: &FilteredMatrix, l: usize, eps: f64, r: Rat) -> Result<Self, QuantError> {
        let p = check_quasi_projection(p, eps, r)?;
        Ok(Self { rep: ClassRep::Even { p, l }, eps, r })
    }

    pub fn odd(u: &UnitizedMatrix, eps: f64, r: Rat) -> Result<Self, QuantError> {
        let u = check_quasi_unitary(u, eps, r)?;
        Ok(Self { rep: ClassRep::Odd { u }, eps, r })
    }

    pub fn degree(&self) -> u8 {
        match self.rep {
            ClassRep::Even { .. } => 0,
            ClassRep::Odd { .. } => 1,
        }
    }

    /// Full matrix of the representative.
    pub fn matrix(&self) -> FilteredMatrix {
        match &self.rep {
            ClassRep::Even { p, .. } => p.matrix.clone(),
            ClassRep::Odd { u } => u.full(),
        }
    }

    pub fn l(&self) -> Option<usize> {
        match &self.rep {
            ClassRep::Even { l, .. } => Some(*l),
            ClassRep::Odd { .. } => None,
        }
    }

    /// `rank kappa0(p) - l`.
    pub fn rank_invariant(&self) -> Result<i64, QuantError> {
        match &self.rep {
            ClassRep::Even { p, l } => Ok(kappa0(p)?.rank as i64 - *l as i64),
            ClassRep::Odd { .. } => Err(QuantError::DegreeMismatch),
        }
    }

    fn rebuild(&self, matrix: FilteredMatrix, l: Option<usize>) -> Result<Self, QuantError> {
        match &self.rep {
            ClassRep::Even { l: old, .. } => Self::even(&matrix, l.unwrap_or(*old), self.eps, self.r),
            ClassRep::Odd { .. } => Self::odd(&UnitizedMatrix::from_matrix(&matrix), self.eps, self.r),
        }
    }

    /// `p -> diag(p, 0_k)`, `u -> diag(u, 1_k)`: `k` extra fiber layers.
    pub fn stabilize(&self, k: usize) -> Result<Self, QuantError> {
        if k == 0 {
            return Ok(self.clone());
        }
        let m = self.matrix();
        let fill = if self.degree() == 0 { 0.0 } else { 1.0 };
        self.rebuild(m.pad_fiber(m.fiber_dim() + k, C64::new(fill, 0.0))?, None)
    }

    /// `[p, l] -> [diag(p, 1_k), l + k n]` with `k` identity fiber layers over
    /// the `n` points; on a one-point space this is `(diag(p, I_k), l + k)`.
    pub fn pad_units(&self, k: usize) -> Result<Self, QuantError> {
        match &self.rep {
            ClassRep::Even { p, l } => {
                let m = &p.matrix;
                let padded = m.pad_fiber(m.fiber_dim() + k, C64::new(1.0, 0.0))?;
                self.rebuild(padded, Some(l + k * m.space().len()))
            }
            ClassRep::Odd { .. } => self.stabilize(k),
        }
    }

    /// Re-badges the same representative at looser `(eps', r')`.
    pub fn relax(&self, eps: f64, r: Rat) -> Result<Self, QuantError> {
        check_eps(eps)?;
        if eps < self.eps || r < self.r {
            return Err(QuantError::IllegalTightening);
        }
        let mut out = self.clone();
        out.eps = eps;
        out.r = r;
        match &mut out.rep {
            ClassRep::Even { p, .. } => {
                p.eps = eps;
                p.r = r;
            }
            ClassRep::Odd { u } => {
                u.eps = eps;
                u.r = r;
            }
        }
        Ok(out)
    }

    /// `[p, l] + [p', l'] = [diag(p, p'), l + l']` and `[u] + [v] = [diag(u, v)]`.
    pub fn direct_sum(&self, other: &Self, layout: SumLayout) -> Result<Self, QuantError> {
        if self.degree() != other.degree() {
            return Err(QuantError::DegreeMismatch);
        }
        if self.eps != other.eps || self.r != other.r {
            return Err(QuantError::ParameterMismatch);
        }
        let (a, b) = (self.matrix(), other.matrix());
        let sum = match layout {
            SumLayout::DoubledFiber => a.fiber_direct_sum(&b)?,
            SumLayout::DisjointUnion => disjoint_block_sum(&a, &b)?,
        };
        let l = match (self.l(), other.l()) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        self.rebuild(sum, l)
    }

    /// `a -> diag(a, 0)` in the enlarged fiber `m' >= m`. In degree 1 the
    /// body of `u = x + lambda` is padded, so the new block carries `lambda`.
    pub fn morita_embed(&self, new_fiber: usize) -> Result<Self, QuantError> {
        let m = self.matrix().fiber_dim();
        if new_fiber < m {
            return Err(QuantError::FiberShrink);
        }
        match &self.rep {
            ClassRep::Even { p, .. } => self.rebuild(p.matrix.pad_fiber(new_fiber, C64::new(0.0, 0.0))?, None),
            ClassRep::Odd { u } => {
                let body = u.matrix.body.pad_fiber(new_fiber, C64::new(0.0, 0.0))?;
                Self::odd(&UnitizedMatrix::new(body, u.matrix.scalar), self.eps, self.r)
            }
        }
    }

    /// Conjugates the representative by a unitary `w`: `w a w*`.
    pub fn conjugate(&self, w: &FilteredMatrix) -> Result<Self, QuantError> {
        let m = self.matrix();
        let conj = w.mul(&m)?.mul(&w.adjoint())?;
        // the conjugate of a Hermitian matrix drifts off self-adjointness by rounding
        let e = conj.entries();
        let sym = if self.degree() == 0 { (e + e.adjoint()) * C64::new(0.5, 0.0) } else { e.clone() };
        self.rebuild(conj.with_entries(sym)?, None)
    }
}

/// `diag(a, b)` on the graph space of the two underlying spaces.
fn disjoint_block_sum(a: &FilteredMatrix, b: &FilteredMatrix) -> Result<FilteredMatrix, QuantError> {
    if a.fiber_dim() != b.fiber_dim() {
        return Err(QuantError::Matrix(crate::filtered_matrix::MatrixError::ShapeMismatch));
    }
    let space = graph_space(&[a.space().clone(), b.space().clone()])
        .map_err(|_| QuantError::Matrix(crate::filtered_matrix::MatrixError::ShapeMismatch))?;
    let (da, db) = (a.dim(), b.dim());
    let mut e = CMat::zeros(da + db, da + db);
    e.view_mut((0, 0), (da, da)).copy_from(a.entries());
    e.view_mut((da, da), (db, db)).copy_from(b.entries());
    Ok(FilteredMatrix::new(Arc::new(space), a.fiber_dim(), e)?)
}
