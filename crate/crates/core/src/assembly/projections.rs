use std::sync::Arc;

use super::AssemblyError;
use crate::coarse_space::{word_metric, word_metric_right, FiniteGroup, FiniteMetricSpace, GroupAction, RipsPoint};
use crate::filtered_matrix::FilteredMatrix;
use crate::quant_k::QuantClass;
use crate::rational::rat_to_f64;
use crate::{CMat, Rat, C64};

/// Residual allowed when comparing translated values.
const EQUIVARIANCE_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-12;

/// A `C(X)`-valued matrix known through its values at sample points.
#[derive(Debug, Clone)]
pub struct SampledFunctionMatrix {
    pub domain_samples: Vec<RipsPoint>,
    pub values: Vec<FilteredMatrix>,
    pub scale: Rat,
    /// Largest translation residual, when an action was checked.
    pub equivariance_residual: Option<f64>,
}

fn check_samples(space: &FiniteMetricSpace, s: Rat, samples: &[RipsPoint]) -> Result<(), AssemblyError> {
    for (i, x) in samples.iter().enumerate() {
        let support = x.support();
        if support.iter().any(|&v| v >= space.len()) {
            return Err(AssemblyError::UnsupportedSample(i));
        }
        let fits = support.iter().all(|&a| support.iter().all(|&b| space.dist(a, b) <= s));
        if !fits {
            return Err(AssemblyError::UnsupportedSample(i));
        }
    }
    Ok(())
}

/// `sqrt(lambda_a lambda_b)`, exact on the diagonal and for equal weights.
fn root_product(x: &RipsPoint, a: usize, b: usize) -> f64 {
    rat_to_f64(&(x.lambda(a) * x.lambda(b))).sqrt()
}

fn rank_one_value(space: &Arc<FiniteMetricSpace>, x: &RipsPoint, xi: &[C64]) -> Result<FilteredMatrix, AssemblyError> {
    let m = xi.len();
    let mut e = CMat::zeros(space.len() * m, space.len() * m);
    let support = x.support();
    for &a in &support {
        for &b in &support {
            let w = C64::new(root_product(x, a, b), 0.0);
            for i in 0..m {
                for j in 0..m {
                    e[(a * m + i, b * m + j)] = w * xi[i] * xi[j].conj();
                }
            }
        }
    }
    Ok(FilteredMatrix::new(space.clone(), m, e)?)
}

/// `Q_{s,Sigma}` evaluated at each sample:
/// `(sigma, sigma')` block `lambda_sigma^{1/2} lambda_sigma'^{1/2} xi0 xi0*`.
pub fn roe_projection(
    space: &Arc<FiniteMetricSpace>,
    s: Rat,
    xi0: &[C64],
    samples: &[RipsPoint],
) -> Result<SampledFunctionMatrix, AssemblyError> {
    let norm = xi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if xi0.is_empty() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(AssemblyError::NonUnitVector(norm));
    }
    check_samples(space, s, samples)?;
    let values = samples.iter().map(|x| rank_one_value(space, x, xi0)).collect::<Result<Vec<_>, _>>()?;
    Ok(SampledFunctionMatrix { domain_samples: samples.to_vec(), values, scale: s, equivariance_residual: None })
}

/// The Mishchenko projection `P_X`: at `x`, the rank-one matrix with entries
/// `lambda_sigma(x)^{1/2} lambda_sigma'(x)^{1/2}`. With an action, every
/// translate `k x` is compared against `U_k P(x) U_k*`.
pub fn mishchenko_px(
    space: &Arc<FiniteMetricSpace>,
    s: Rat,
    samples: &[RipsPoint],
    action: Option<&GroupAction>,
) -> Result<SampledFunctionMatrix, AssemblyError> {
    let mut out = roe_projection(space, s, &[C64::new(1.0, 0.0)], samples)?;
    if let Some(action) = action {
        if action.point_count() != space.len() {
            return Err(AssemblyError::ActionMismatch);
        }
        let mut worst = 0.0f64;
        for (x, value) in samples.iter().zip(&out.values) {
            for k in 0..action.group().order() {
                let moved = x.map_points(|v| action.act(k, v));
                let direct = rank_one_value(space, &moved, &[C64::new(1.0, 0.0)])?;
                let n = space.len();
                let conj = CMat::from_fn(n, n, |a, b| {
                    // (U_k P U_k*)(k a, k b) = P(a, b)
                    let (pa, pb) = (preimage(action, k, a), preimage(action, k, b));
                    value.entries()[(pa, pb)]
                });
                let diff = (&conj - direct.entries()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
                worst = worst.max(diff);
            }
        }
        if worst > EQUIVARIANCE_TOL {
            return Err(AssemblyError::EquivarianceFailed(worst));
        }
        out.equivariance_residual = Some(worst);
    }
    Ok(out)
}

fn preimage(action: &GroupAction, k: usize, a: usize) -> usize {
    let inv = action.group().inv(k);
    action.act(inv, a)
}

/// Index space of the crossed-product model: the group with the metric
/// `d(g, h) = |g h^-1|`.
pub fn group_space(group: &FiniteGroup, gens: &[usize]) -> Result<Arc<FiniteMetricSpace>, AssemblyError> {
    Ok(Arc::new(word_metric_right(group, gens)?))
}

/// Barycenter of the full simplex when `d` reaches the diameter, otherwise
/// the midpoint of the edge from the identity to the first generator.
pub fn default_group_sample(group: &FiniteGroup, gens: &[usize], d: Rat) -> Result<RipsPoint, AssemblyError> {
    let (rips_space, _) = word_metric(group, gens)?;
    if d < Rat::from_integer(1) {
        return Err(AssemblyError::ScaleTooSmall(d));
    }
    if d >= rips_space.diameter() {
        let all: Vec<usize> = (0..group.order()).collect();
        Ok(RipsPoint::barycenter(&rips_space, d, &all)?)
    } else {
        let e = group.identity();
        let edge = match gens.iter().find(|&&g| g != e) {
            Some(&g) => vec![e.min(g), e.max(g)],
            None => vec![e],
        };
        Ok(RipsPoint::barycenter(&rips_space, d, &edge)?)
    }
}

/// `p_{Gamma,d}` in the regular representation at a point `x` of the Rips
/// complex of `Gamma` (left-invariant word metric): the `(g, h)` entry is
/// `lambda_{g^-1}(x)^{1/2} lambda_{h^-1}(x)^{1/2}`.
pub fn group_projection_at(
    group: &FiniteGroup,
    gens: &[usize],
    d: Rat,
    x: &RipsPoint,
) -> Result<FilteredMatrix, AssemblyError> {
    if d < Rat::from_integer(1) {
        return Err(AssemblyError::ScaleTooSmall(d));
    }
    let (rips_space, _) = word_metric(group, gens)?;
    check_samples(&rips_space, d, std::slice::from_ref(x))?;
    let space = group_space(group, gens)?;
    let n = group.order();
    let e = CMat::from_fn(n, n, |g, h| C64::new(root_product(x, group.inv(g), group.inv(h)), 0.0));
    Ok(FilteredMatrix::new(space, 1, e)?)
}

/// `p_{Gamma,d}` at the default sample.
pub fn group_projection(group: &FiniteGroup, gens: &[usize], d: Rat) -> Result<FilteredMatrix, AssemblyError> {
    let x = default_group_sample(group, gens, d)?;
    group_projection_at(group, gens, d, &x)
}

/// Largest entrywise residual of `R_k P(x) R_k* = P(k x)` over all `k`, with
/// `R_k` the right regular representation `(R_k xi)(g) = xi(g k)`.
pub fn invariance_defect(group: &FiniteGroup, gens: &[usize], d: Rat, x: &RipsPoint) -> Result<f64, AssemblyError> {
    let p = group_projection_at(group, gens, d, x)?;
    let n = group.order();
    let mut worst = 0.0f64;
    for k in 0..n {
        let moved = x.map_points(|v| group.mul(k, v));
        let pk = group_projection_at(group, gens, d, &moved)?;
        for g in 0..n {
            for h in 0..n {
                let lhs = p.entries()[(group.mul(g, k), group.mul(h, k))];
                worst = worst.max((lhs - pk.entries()[(g, h)]).norm());
            }
        }
    }
    Ok(worst)
}

/// The degree-0 class `[P(x0), 0]` at `(eps, r)`.
pub fn eval_assembly_class(
    px: &SampledFunctionMatrix,
    x0: usize,
    eps: f64,
    r: Rat,
) -> Result<QuantClass, AssemblyError> {
    let value = px.values.get(x0).ok_or(AssemblyError::SampleOutOfRange(x0))?;
    if r < px.scale {
        return Err(AssemblyError::RadiusBelowScale { r, s: px.scale });
    }
    Ok(QuantClass::even(value, 0, eps, r)?)
}
