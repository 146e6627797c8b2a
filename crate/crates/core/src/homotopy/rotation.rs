use std::sync::Arc;

use super::{certify, HomotopyCertificate, HomotopyError, PathKind};
use crate::coarse_space::FiniteMetricSpace;
use crate::filtered_matrix::FilteredMatrix;
use crate::quant_k::QuasiUnitary;
use crate::{CMat, C64};

/// Blockwise rotation by `angle` on the doubled fiber: over each point the
/// fiber splits as `C^m + C^m` and the block is `[[c, -s], [s, c]]`.
fn doubled_rotation(space: &Arc<FiniteMetricSpace>, m: usize, angle: f64) -> FilteredMatrix {
    let n = space.len();
    let (c, s) = (angle.cos(), angle.sin());
    let mut e = CMat::zeros(2 * n * m, 2 * n * m);
    for x in 0..n {
        let base = x * 2 * m;
        for i in 0..m {
            let (a, b) = (base + i, base + m + i);
            e[(a, a)] = C64::new(c, 0.0);
            e[(a, b)] = C64::new(-s, 0.0);
            e[(b, a)] = C64::new(s, 0.0);
            e[(b, b)] = C64::new(c, 0.0);
        }
    }
    FilteredMatrix::new(space.clone(), 2 * m, e).expect("finite rotation")
}

/// The Whitehead rotation `t -> diag(u, 1) R_t diag(1, u*) R_t^{-1}` sampled
/// at `t = k / steps`, certified at `(3 eps, 2 r)`. It runs from
/// `diag(u, u*)` to `diag(u u*, 1)`.
pub fn rotation_homotopy(u: &QuasiUnitary, steps: usize) -> Result<HomotopyCertificate, HomotopyError> {
    if steps < 8 {
        return Err(HomotopyError::TooFewSteps(steps));
    }
    let full = u.full();
    let space = full.space_arc().clone();
    let m = full.fiber_dim();
    let one = FilteredMatrix::identity(space.clone(), m);
    let left = full.fiber_direct_sum(&one)?;
    let right = one.fiber_direct_sum(&full.adjoint())?;
    let samples = (0..=steps)
        .map(|k| {
            let angle = std::f64::consts::FRAC_PI_2 * k as f64 / steps as f64;
            let rot = doubled_rotation(&space, m, angle);
            left.mul(&rot)?.mul(&right)?.mul(&rot.adjoint())
        })
        .collect::<Result<Vec<_>, _>>()?;
    certify(samples, PathKind::UnitaryPath, 3.0 * u.eps, u.r * 2)
}
