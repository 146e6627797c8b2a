use super::{FilteredMatrix, MatrixError};
use crate::coarse_space::{FiniteGroup, GroupAction};
use crate::{CMat, C64};

/// A unitary representation of the acting group on the fiber.
#[derive(Debug, Clone)]
pub struct FiberRep {
    mats: Vec<CMat>,
}

impl FiberRep {
    pub fn trivial(group: &FiniteGroup, m: usize) -> Self {
        Self { mats: vec![CMat::identity(m, m); group.order()] }
    }

    /// Left regular representation on `l2(F)`: `u_k e_g = e_{kg}`.
    pub fn regular(group: &FiniteGroup) -> Self {
        let n = group.order();
        let mats = (0..n)
            .map(|k| {
                let mut u = CMat::zeros(n, n);
                for g in 0..n {
                    u[(group.mul(k, g), g)] = C64::new(1.0, 0.0);
                }
                u
            })
            .collect();
        Self { mats }
    }

    /// Validates unitarity and the homomorphism property.
    pub fn new(group: &FiniteGroup, mats: Vec<CMat>) -> Result<Self, MatrixError> {
        let bad = |m: &str| MatrixError::BadFiberRep(m.to_string());
        if mats.len() != group.order() {
            return Err(bad("one matrix per group element required"));
        }
        let m = mats[0].nrows();
        if mats.iter().any(|u| u.nrows() != m || u.ncols() != m) {
            return Err(bad("all matrices must be square of one size"));
        }
        let close = |a: &CMat, b: &CMat| (a - b).iter().all(|z| z.norm() < 1e-12);
        for u in &mats {
            if !close(&(u.adjoint() * u), &CMat::identity(m, m)) {
                return Err(bad("not unitary"));
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if !close(&(&mats[g] * &mats[h]), &mats[group.mul(g, h)]) {
                    return Err(bad("not a homomorphism"));
                }
            }
        }
        Ok(Self { mats })
    }

    pub fn dim(&self) -> usize {
        self.mats.first().map_or(0, CMat::nrows)
    }

    pub fn matrix(&self, k: usize) -> &CMat {
        &self.mats[k]
    }
}

/// The unitary `U_k = (permutation of points by k) (x) rho(k)`.
pub fn action_unitary(action: &GroupAction, rep: &FiberRep, k: usize) -> CMat {
    let n = action.point_count();
    let m = rep.dim();
    let rho = rep.matrix(k);
    let mut u = CMat::zeros(n * m, n * m);
    for x in 0..n {
        let y = action.act(k, x);
        for i in 0..m {
            for j in 0..m {
                u[(y * m + i, x * m + j)] = rho[(i, j)];
            }
        }
    }
    u
}

/// Averages `U_k T U_k*` over the group: the conditional expectation onto
/// the invariant elements.
pub fn fixed_point_project(
    t: &FilteredMatrix,
    action: &GroupAction,
    rep: &FiberRep,
) -> Result<FilteredMatrix, MatrixError> {
    if action.point_count() != t.space().len() || rep.dim() != t.fiber_dim() {
        return Err(MatrixError::ActionSpaceMismatch);
    }
    let order = action.group().order();
    let d = t.dim();
    let mut acc = CMat::zeros(d, d);
    for k in 0..order {
        let u = action_unitary(action, rep, k);
        acc += &u * t.entries() * u.adjoint();
    }
    t.with_entries(acc / C64::new(order as f64, 0.0))
}
