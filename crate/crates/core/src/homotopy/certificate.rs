use serde::Serialize;

use super::HomotopyError;
use crate::filtered_matrix::FilteredMatrix;
use crate::quant_k::{projection_defect, unitary_defects, SELF_ADJOINT_ABS_TOL};
use crate::rational::serde_rat;
use crate::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    ProjectionPath,
    UnitaryPath,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleMetrics {
    pub defect: f64,
    #[serde(with = "serde_rat")]
    pub propagation: Rat,
    pub norm: f64,
}

/// A sampled path with per-sample metrics and its interpolation bound.
#[derive(Debug, Clone)]
pub struct HomotopyCertificate {
    pub samples: Vec<FilteredMatrix>,
    pub kind: PathKind,
    pub per_sample: Vec<SampleMetrics>,
    pub step_norms: Vec<f64>,
    pub claimed_eps: f64,
    pub claimed_r: Rat,
    pub slack: f64,
    pub max_defect: f64,
    pub max_propagation: Rat,
    pub eps_eff: f64,
    /// `eps_eff < 1/4` for projection paths, `eps_eff < 1` for unitary paths.
    pub interpolation_complete: bool,
    /// Every sample passed and `eps_eff` is below the acceptance limit.
    pub accepted: bool,
}

impl HomotopyCertificate {
    pub fn source(&self) -> &FilteredMatrix {
        &self.samples[0]
    }

    pub fn target(&self) -> &FilteredMatrix {
        self.samples.last().expect("at least two samples")
    }

    /// Endpoint check against declared source and target, entrywise within `tol`.
    pub fn endpoints_match(&self, source: &FilteredMatrix, target: &FilteredMatrix, tol: f64) -> bool {
        let close = |a: &FilteredMatrix, b: &FilteredMatrix| {
            a.dim() == b.dim() && (a.entries() - b.entries()).iter().all(|z| z.norm() <= tol)
        };
        close(self.source(), source) && close(self.target(), target)
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.samples.reverse();
        out.per_sample.reverse();
        out.step_norms.reverse();
        out
    }

    /// Acceptance limit on `eps_eff`.
    pub fn limit(&self) -> f64 {
        acceptance_limit(self.kind, self.claimed_eps, self.slack)
    }
}

fn acceptance_limit(kind: PathKind, eps: f64, slack: f64) -> f64 {
    match kind {
        PathKind::ProjectionPath => (eps + slack).min(0.25),
        PathKind::UnitaryPath => eps + slack,
    }
}

/// `max_defect + delta (2M + 1) + delta^2`.
pub fn interpolation_bound(max_defect: f64, max_step: f64, max_norm: f64) -> f64 {
    max_defect + max_step * (2.0 * max_norm + 1.0) + max_step * max_step
}

pub fn certify(
    samples: Vec<FilteredMatrix>,
    kind: PathKind,
    eps: f64,
    r: Rat,
) -> Result<HomotopyCertificate, HomotopyError> {
    certify_with_slack(samples, kind, eps, r, 0.0)
}

/// Validates every sample at `(eps, r)` and computes the interpolation bound.
/// Per-sample failures are errors; an interpolation bound above the limit
/// yields a certificate with `accepted == false`.
pub fn certify_with_slack(
    samples: Vec<FilteredMatrix>,
    kind: PathKind,
    eps: f64,
    r: Rat,
    slack: f64,
) -> Result<HomotopyCertificate, HomotopyError> {
    let (per_sample, step_norms) = measure(&samples, kind)?;
    for (index, m) in per_sample.iter().enumerate() {
        if m.defect >= eps {
            return Err(HomotopyError::SampleDefect { index, defect: m.defect, eps });
        }
        if m.propagation > r {
            return Err(HomotopyError::SamplePropagation { index, propagation: m.propagation, r });
        }
    }
    Ok(assemble(samples, kind, per_sample, step_norms, eps, r, slack))
}

pub(crate) fn measure(
    samples: &[FilteredMatrix],
    kind: PathKind,
) -> Result<(Vec<SampleMetrics>, Vec<f64>), HomotopyError> {
    if samples.len() < 2 {
        return Err(HomotopyError::TooFewSamples);
    }
    let first = &samples[0];
    if samples.iter().any(|s| s.fiber_dim() != first.fiber_dim() || s.space() != first.space()) {
        return Err(HomotopyError::ShapeMismatch);
    }
    let per_sample = samples
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let defect = match kind {
                PathKind::ProjectionPath => {
                    let scale = s.entries().iter().fold(1.0f64, |a, z| a.max(z.norm()));
                    if s.self_adjoint_defect() > SELF_ADJOINT_ABS_TOL * scale {
                        return Err(HomotopyError::SampleNotSelfAdjoint { index });
                    }
                    projection_defect(s.entries())
                }
                PathKind::UnitaryPath => {
                    let (a, b) = unitary_defects(s.entries());
                    a.max(b)
                }
            };
            Ok(SampleMetrics { defect, propagation: s.propagation(), norm: s.operator_norm() })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let step_norms =
        samples.windows(2).map(|w| crate::filtered_matrix::operator_norm(&(w[1].entries() - w[0].entries()))).collect();
    Ok((per_sample, step_norms))
}

pub(crate) fn assemble(
    samples: Vec<FilteredMatrix>,
    kind: PathKind,
    per_sample: Vec<SampleMetrics>,
    step_norms: Vec<f64>,
    eps: f64,
    r: Rat,
    slack: f64,
) -> HomotopyCertificate {
    let max_defect = per_sample.iter().map(|m| m.defect).fold(0.0, f64::max);
    let max_norm = per_sample.iter().map(|m| m.norm).fold(0.0, f64::max);
    let max_step = step_norms.iter().copied().fold(0.0, f64::max);
    let max_propagation = per_sample.iter().map(|m| m.propagation).max().unwrap_or_default();
    let eps_eff = interpolation_bound(max_defect, max_step, max_norm);
    let interpolation_complete = match kind {
        PathKind::ProjectionPath => eps_eff < 0.25,
        PathKind::UnitaryPath => eps_eff < 1.0,
    };
    let samples_pass = per_sample.iter().all(|m| m.defect < eps && m.propagation <= r);
    let accepted = samples_pass && eps_eff < acceptance_limit(kind, eps, slack);
    HomotopyCertificate {
        samples,
        kind,
        per_sample,
        step_norms,
        claimed_eps: eps,
        claimed_r: r,
        slack,
        max_defect,
        max_propagation,
        eps_eff,
        interpolation_complete,
        accepted,
    }
}
