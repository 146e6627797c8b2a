use super::certificate::{assemble, interpolation_bound, measure};
use super::{HomotopyCertificate, HomotopyError, PathKind};
use crate::filtered_matrix::{hermitian_eig, operator_norm, FilteredMatrix};
use crate::quant_k::{kappa0, QuasiProjection};
use crate::{CMat, Rat, C64};

/// Sampling and search knobs for [`connect_projections`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectOptions {
    /// Samples per unit of path length (linear legs) or of rotation angle.
    pub density: f64,
    /// Overrides the sample count of the rotation leg.
    pub steps: Option<usize>,
    /// Maximum number of sample-count doublings while the interpolation
    /// bound stays above `eps'`.
    pub max_refinements: u32,
    /// Truncate intermediate samples to the propagation budget.
    pub truncate: bool,
}

impl Default for ConnectOptions {
    fn default() -> Self {
        Self { density: 64.0, steps: None, max_refinements: 6, truncate: true }
    }
}

const ANGLE_TOL: f64 = 1e-14;
const SINGULAR_TOL: f64 = 1e-7;

/// Rotation of one range onto another through their principal angles.
///
/// For orthonormal bases `B_p`, `B_q` of equal rank, the singular value
/// decomposition of `B_q* B_p` pairs unit vectors `u_i` of the first range with
/// `v_i = cos(theta_i) u_i + sin(theta_i) w_i` of the second, `w_i` orthogonal
/// to the first range. The path of projections onto
/// `span{cos(t theta_i) u_i + sin(t theta_i) w_i}` stays inside
/// `range(P) + range(Q)`.
#[derive(Debug, Clone)]
pub struct DirectRotation {
    dim: usize,
    planes: Vec<(CMat, CMat, f64)>,
}

impl DirectRotation {
    /// Largest principal angle, the norm of the skew generator.
    pub fn generator_norm(&self) -> f64 {
        self.planes.iter().map(|p| p.2).fold(0.0, f64::max)
    }

    pub fn angles(&self) -> Vec<f64> {
        self.planes.iter().map(|p| p.2).collect()
    }

    /// The projection reached at time `t` in `[0, 1]`.
    pub fn at(&self, t: f64) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for (u, w, theta) in &self.planes {
            let col = u * C64::new((t * theta).cos(), 0.0) + w * C64::new((t * theta).sin(), 0.0);
            out += &col * col.adjoint();
        }
        hermitian_part(&out)
    }
}

fn hermitian_part(a: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * C64::new(0.5, 0.0))
}

fn range_basis(p: &CMat) -> Result<CMat, HomotopyError> {
    let eig = hermitian_eig(p)?;
    let keep = eig.columns_where(|x| x > 0.5);
    let mut basis = CMat::zeros(p.nrows(), keep.len());
    for (c, &j) in keep.iter().enumerate() {
        basis.set_column(c, &eig.vectors.column(j));
    }
    Ok(basis)
}

/// Principal-angle rotation from the range of `bp` to the range of `bq`
/// (orthonormal columns, same count).
pub fn direct_rotation(bp: &CMat, bq: &CMat) -> Result<DirectRotation, HomotopyError> {
    let k = bp.ncols();
    if bq.ncols() != k || bp.nrows() != bq.nrows() {
        return Err(HomotopyError::ShapeMismatch);
    }
    let dim = bp.nrows();
    let overlap = bq.adjoint() * bp;
    let right = hermitian_eig(&(overlap.adjoint() * &overlap))?;
    let left = hermitian_eig(&(&overlap * overlap.adjoint()))?;

    // pair right singular vectors z_i with left ones y_i, largest sigma first
    let mut ys: Vec<CMat> = Vec::with_capacity(k);
    let mut zs: Vec<CMat> = Vec::with_capacity(k);
    let mut pending: Vec<CMat> = Vec::new();
    for j in (0..k).rev() {
        let z = right.vectors.columns(j, 1).into_owned();
        let sigma = right.values[j].max(0.0).sqrt();
        if sigma > SINGULAR_TOL {
            ys.push(&overlap * &z * C64::new(1.0 / sigma, 0.0));
            zs.push(z);
        } else {
            pending.push(z);
        }
    }
    // near-orthogonal directions: complete the y's from the small end of
    // the left spectrum, orthogonalized against those already chosen
    let mut candidates = (0..k).map(|j| left.vectors.columns(j, 1).into_owned());
    for z in pending {
        loop {
            let Some(mut y) = candidates.next() else {
                return Err(HomotopyError::ShapeMismatch);
            };
            for prev in &ys {
                let c = (prev.adjoint() * &y)[(0, 0)];
                y -= prev * c;
            }
            let norm = y.norm();
            if norm > 0.5 {
                ys.push(y / C64::new(norm, 0.0));
                zs.push(z);
                break;
            }
        }
    }

    let mut planes = Vec::with_capacity(k);
    for (y, z) in ys.iter().zip(&zs) {
        let u = bp * z;
        let mut v = bq * y;
        let c = (u.adjoint() * &v)[(0, 0)];
        if c.norm() > 0.0 {
            v *= (c / c.norm()).conj();
        }
        let cos = (u.adjoint() * &v)[(0, 0)].re;
        let mut w = &v - &u * C64::new(cos, 0.0);
        let sin = w.norm();
        let theta = sin.atan2(cos);
        if theta <= ANGLE_TOL {
            w.fill(C64::new(0.0, 0.0));
            planes.push((u, w, 0.0));
        } else {
            w /= C64::new(sin, 0.0);
            planes.push((u, w, theta));
        }
    }
    Ok(DirectRotation { dim, planes })
}

fn linear_leg(from: &CMat, to: &CMat, steps: usize) -> Vec<CMat> {
    (1..=steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            from * C64::new(1.0 - t, 0.0) + to * C64::new(t, 0.0)
        })
        .collect()
}

fn leg_steps(length: f64, density: f64, factor: usize) -> usize {
    if length <= 0.0 {
        0
    } else {
        ((density * length).ceil() as usize).max(1) * factor
    }
}

/// Connects two quasi-projections of equal rounded rank by
/// `p -> kappa0(p)` (linear), `kappa0(p) -> kappa0(q)` (principal-angle
/// rotation), `kappa0(q) -> q` (linear), and certifies the samples at
/// `(eps, r)`.
///
/// Interior samples whose propagation exceeds `r` are truncated when the
/// discarded norm is below `(eps - defect) / 4`. Samples are doubled while
/// only the interpolation bound is in the way.
pub fn connect_projections(
    p: &QuasiProjection,
    q: &QuasiProjection,
    r: Rat,
    eps: f64,
    opts: &ConnectOptions,
) -> Result<HomotopyCertificate, HomotopyError> {
    let (pm, qm) = (&p.matrix, &q.matrix);
    if pm.fiber_dim() != qm.fiber_dim() || pm.space() != qm.space() {
        return Err(HomotopyError::ShapeMismatch);
    }
    let kp = kappa0(p)?;
    let kq = kappa0(q)?;
    if kp.rank != kq.rank {
        return Err(HomotopyError::RankMismatch { source_rank: kp.rank, target_rank: kq.rank });
    }

    let (pe, qe) = (pm.entries(), qm.entries());
    if pe == qe {
        return finish(vec![pm.clone(), pm.clone()], eps, r).map(|(cert, _)| cert).and_then(|cert| {
            if cert.accepted {
                Ok(cert)
            } else {
                Err(infeasible(&cert, 0.0))
            }
        });
    }

    let (big_p, big_q) = (kp.projection.entries(), kq.projection.entries());
    let rotation = direct_rotation(&range_basis(big_p)?, &range_basis(big_q)?)?;
    let lengths = [operator_norm(&(big_p - pe)), rotation.generator_norm(), operator_norm(&(qe - big_q))];

    let mut last = None;
    for refinement in 0..=opts.max_refinements {
        let factor = 1usize << refinement;
        let n1 = leg_steps(lengths[0], opts.density, factor);
        let n2 = match opts.steps {
            Some(s) if lengths[1] > 0.0 => s.max(1) * factor,
            _ => leg_steps(lengths[1], opts.density, factor),
        };
        let n3 = leg_steps(lengths[2], opts.density, factor);

        let mut raw: Vec<CMat> = vec![pe.clone()];
        raw.extend(linear_leg(pe, big_p, n1));
        raw.extend((1..n2).map(|k| rotation.at(k as f64 / n2 as f64)));
        if n2 > 0 {
            raw.push(big_q.clone());
        }
        raw.extend(linear_leg(big_q, qe, n3));
        if raw.len() < 2 {
            raw.push(qe.clone());
        }
        let last_index = raw.len() - 1;
        raw[last_index] = qe.clone();

        let samples = raw.into_iter().map(|e| pm.with_entries(e)).collect::<Result<Vec<_>, _>>()?;
        let (raw_metrics, raw_steps) = measure(&samples, PathKind::ProjectionPath)?;
        let raw_cert = assemble(samples.clone(), PathKind::ProjectionPath, raw_metrics, raw_steps, eps, r, 0.0);

        let mut discarded = 0.0f64;
        let mut truncated = Vec::with_capacity(samples.len());
        for (k, s) in samples.into_iter().enumerate() {
            if s.propagation() <= r {
                truncated.push(s);
                continue;
            }
            let endpoint = k == 0 || k == last_index;
            if endpoint || !opts.truncate {
                return Err(infeasible(&raw_cert, discarded));
            }
            let (cut, report) = s.truncate(r);
            discarded = discarded.max(report.exact_norm);
            if report.exact_norm >= (eps - raw_cert.per_sample[k].defect) / 4.0 {
                return Err(infeasible(&raw_cert, discarded));
            }
            truncated.push(cut);
        }

        let (cert, per_sample_ok) = finish(truncated, eps, r)?;
        if cert.accepted {
            return Ok(cert);
        }
        if !per_sample_ok {
            return Err(infeasible(&raw_cert, discarded));
        }
        last = Some(cert.eps_eff);
    }
    Err(HomotopyError::RefinementLimit { eps_eff: last.unwrap_or(f64::INFINITY) })
}

fn finish(samples: Vec<FilteredMatrix>, eps: f64, r: Rat) -> Result<(HomotopyCertificate, bool), HomotopyError> {
    let (metrics, steps) = measure(&samples, PathKind::ProjectionPath)?;
    let ok = metrics.iter().all(|m| m.defect < eps && m.propagation <= r);
    Ok((assemble(samples, PathKind::ProjectionPath, metrics, steps, eps, r, 0.0), ok))
}

fn infeasible(cert: &HomotopyCertificate, discarded_norm: f64) -> HomotopyError {
    let max_step = cert.step_norms.iter().copied().fold(0.0, f64::max);
    let max_norm = cert.per_sample.iter().map(|m| m.norm).fold(0.0, f64::max);
    HomotopyError::BudgetInfeasible {
        achieved_eps: interpolation_bound(cert.max_defect, max_step, max_norm),
        achieved_r: cert.max_propagation,
        discarded_norm,
    }
}
