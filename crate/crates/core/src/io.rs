//! JSON file formats: `space.v1`, `action.v1`, `matrix.v1`, `class.v1`,
//! `samples.v1` and `cert.v1`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coarse_space::{ActionFile, FiniteMetricSpace, GroupAction, RipsPoint, SpaceFile};
use crate::filtered_matrix::{FilteredMatrix, UnitizedMatrix};
use crate::homotopy::{HomotopyCertificate, PathKind, SampleMetrics};
use crate::quant_k::{ClassRep, QuantClass};
use crate::rational::{format_rat, parse_rat, serde_rat};
use crate::{CMat, Rat, C64};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON")]
    Json(#[from] serde_json::Error),
    #[error("unexpected schema {found:?}, expected {expected:?}")]
    Schema { expected: &'static str, found: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Rat(#[from] crate::rational::ParseRatError),
    #[error(transparent)]
    Space(#[from] crate::coarse_space::SpaceError),
    #[error(transparent)]
    Matrix(#[from] crate::filtered_matrix::MatrixError),
    #[error(transparent)]
    Quant(#[from] crate::quant_k::QuantError),
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_path_buf(), source })
}

fn check_schema(found: &Option<String>, expected: &'static str) -> Result<(), IoError> {
    match found {
        Some(s) if s != expected => Err(IoError::Schema { expected, found: s.clone() }),
        _ => Ok(()),
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn load_space(path: &Path) -> Result<FiniteMetricSpace, IoError> {
    let file: SpaceFile = serde_json::from_str(&read_text(path)?)?;
    check_schema(&file.schema, "space.v1")?;
    FiniteMetricSpace::from_file(&file)
}

pub fn load_action(path: &Path, space: &FiniteMetricSpace) -> Result<GroupAction, IoError> {
    let file: ActionFile = serde_json::from_str(&read_text(path)?)?;
    check_schema(&file.schema, "action.v1")?;
    Ok(GroupAction::from_file(&file, space)?)
}

/// A space given inline or as a path relative to the referencing file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceFile),
}

impl SpaceRef {
    pub fn resolve(&self, base: &Path) -> Result<FiniteMetricSpace, IoError> {
        match self {
            SpaceRef::Inline(file) => FiniteMetricSpace::from_file(file),
            SpaceRef::Path(p) => load_space(&base.join(p)),
        }
    }
}

/// `matrix.v1`: row-major entries as `[re, im]` pairs. An optional
/// `scalar` marks a unitized element `body + scalar * 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub space: SpaceRef,
    pub fiber_dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<[f64; 2]>,
}

pub fn entries_to_rows(e: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..e.nrows()).map(|i| (0..e.ncols()).map(|j| [e[(i, j)].re, e[(i, j)].im]).collect()).collect()
}

pub fn rows_to_entries(rows: &[Vec<[f64; 2]>]) -> Result<CMat, IoError> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(IoError::Invalid("entries must form a square matrix".into()));
    }
    Ok(CMat::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

impl MatrixFile {
    pub fn new(m: &FilteredMatrix, space: SpaceRef) -> Self {
        Self {
            schema: Some("matrix.v1".into()),
            space,
            fiber_dim: m.fiber_dim(),
            entries: entries_to_rows(m.entries()),
            scalar: None,
        }
    }

    pub fn inline(m: &FilteredMatrix) -> Self {
        Self::new(m, SpaceRef::Inline(m.space().to_file()))
    }

    pub fn unitized(u: &UnitizedMatrix) -> Self {
        let mut f = Self::inline(&u.body);
        f.scalar = Some([u.scalar.re, u.scalar.im]);
        f
    }

    pub fn to_matrix(&self, base: &Path) -> Result<FilteredMatrix, IoError> {
        check_schema(&self.schema, "matrix.v1")?;
        let space = Arc::new(self.space.resolve(base)?);
        self.to_matrix_on(space)
    }

    pub fn to_matrix_on(&self, space: Arc<FiniteMetricSpace>) -> Result<FilteredMatrix, IoError> {
        Ok(FilteredMatrix::new(space, self.fiber_dim, rows_to_entries(&self.entries)?)?)
    }

    /// Unitized reading: a missing `scalar` means the entries are the full matrix.
    pub fn to_unitized(&self, base: &Path) -> Result<UnitizedMatrix, IoError> {
        let body = self.to_matrix(base)?;
        Ok(match self.scalar {
            Some([re, im]) => UnitizedMatrix::new(body, C64::new(re, im)),
            None => UnitizedMatrix::new(body, C64::new(0.0, 0.0)),
        })
    }
}

pub fn load_matrix_file(path: &Path) -> Result<MatrixFile, IoError> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn load_matrix(path: &Path) -> Result<FilteredMatrix, IoError> {
    load_matrix_file(path)?.to_matrix(&parent_dir(path))
}

pub fn load_unitized(path: &Path) -> Result<UnitizedMatrix, IoError> {
    load_matrix_file(path)?.to_unitized(&parent_dir(path))
}

/// `class.v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub degree: u8,
    pub eps: String,
    pub r: String,
    pub matrix: MatrixFile,
    #[serde(default)]
    pub l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_propagation: Option<String>,
}

impl ClassFile {
    pub fn from_class(c: &QuantClass) -> Self {
        let (matrix, l, defect, prop) = match &c.rep {
            ClassRep::Even { p, l } => (MatrixFile::inline(&p.matrix), *l, p.defect, p.measured_propagation),
            ClassRep::Odd { u } => (MatrixFile::unitized(&u.matrix), 0, u.defect(), u.measured_propagation),
        };
        Self {
            schema: Some("class.v1".into()),
            degree: c.degree(),
            eps: format!("{}", c.eps),
            r: format_rat(&c.r),
            matrix,
            l,
            measured_defect: Some(defect),
            measured_propagation: Some(format_rat(&prop)),
        }
    }

    pub fn to_class(&self, base: &Path) -> Result<QuantClass, IoError> {
        check_schema(&self.schema, "class.v1")?;
        let eps: f64 = self.eps.trim().parse().map_err(|_| IoError::Invalid(format!("bad eps {:?}", self.eps)))?;
        let r = parse_rat(&self.r)?;
        match self.degree {
            0 => Ok(QuantClass::even(&self.matrix.to_matrix(base)?, self.l, eps, r)?),
            1 => Ok(QuantClass::odd(&self.matrix.to_unitized(base)?, eps, r)?),
            d => Err(IoError::Invalid(format!("degree must be 0 or 1, got {d}"))),
        }
    }
}

pub fn load_class(path: &Path) -> Result<QuantClass, IoError> {
    let file: ClassFile = serde_json::from_str(&read_text(path)?)?;
    file.to_class(&parent_dir(path))
}

/// `samples.v1`: points of a Rips complex as label-to-weight maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplesFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub space: SpaceRef,
    pub scale: String,
    pub points: Vec<BTreeMap<String, String>>,
}

impl SamplesFile {
    pub fn resolve(&self, base: &Path) -> Result<(Arc<FiniteMetricSpace>, Rat, Vec<RipsPoint>), IoError> {
        check_schema(&self.schema, "samples.v1")?;
        let space = self.space.resolve(base)?;
        let scale = parse_rat(&self.scale)?;
        let points = self
            .points
            .iter()
            .map(|w| {
                let weights = w
                    .iter()
                    .map(|(label, weight)| {
                        let v = space
                            .index_of(label)
                            .ok_or_else(|| IoError::Invalid(format!("unknown point {label:?}")))?;
                        Ok((v, parse_rat(weight)?))
                    })
                    .collect::<Result<BTreeMap<usize, Rat>, IoError>>()?;
                Ok(RipsPoint::new(&space, scale, weights)?)
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        Ok((Arc::new(space), scale, points))
    }

    pub fn from_points(space: &FiniteMetricSpace, scale: Rat, points: &[RipsPoint]) -> Self {
        let labels = space.labels();
        Self {
            schema: Some("samples.v1".into()),
            space: SpaceRef::Inline(space.to_file()),
            scale: format_rat(&scale),
            points: points
                .iter()
                .map(|x| x.weights().iter().map(|(&v, w)| (labels[v].clone(), format_rat(w))).collect())
                .collect(),
        }
    }
}

pub fn load_samples(path: &Path) -> Result<(Arc<FiniteMetricSpace>, Rat, Vec<RipsPoint>), IoError> {
    let file: SamplesFile = serde_json::from_str(&read_text(path)?)?;
    file.resolve(&parent_dir(path))
}

/// Samples of a certificate, inline or replaced by content hashes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertSamples {
    Inline(Vec<Vec<Vec<[f64; 2]>>>),
    Hashes(Vec<String>),
}

/// `cert.v1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertFile {
    pub schema: &'static str,
    pub kind: PathKind,
    pub claimed_eps: f64,
    #[serde(with = "serde_rat")]
    pub claimed_r: Rat,
    pub interpolation_slack: f64,
    pub max_defect: f64,
    #[serde(with = "serde_rat")]
    pub max_propagation: Rat,
    pub eps_eff: f64,
    pub interpolation_complete: bool,
    pub verdict: &'static str,
    pub sample_count: usize,
    pub per_sample: Vec<SampleMetrics>,
    pub step_norms: Vec<f64>,
    pub space: SpaceFile,
    pub fiber_dim: usize,
    pub samples: CertSamples,
}

impl CertFile {
    /// Builds the file with inline samples, or with each sample replaced by
    /// `hash(entries)` when a hasher is supplied.
    pub fn new(cert: &HomotopyCertificate, hasher: Option<&dyn Fn(&str) -> String>) -> Self {
        let rows: Vec<_> = cert.samples.iter().map(|s| entries_to_rows(s.entries())).collect();
        let samples = match hasher {
            None => CertSamples::Inline(rows),
            Some(h) => CertSamples::Hashes(
                rows.iter().map(|r| h(&serde_json::to_string(r).expect("finite entries serialize"))).collect(),
            ),
        };
        let first = cert.source();
        Self {
            schema: "cert.v1",
            kind: cert.kind,
            claimed_eps: cert.claimed_eps,
            claimed_r: cert.claimed_r,
            interpolation_slack: cert.slack,
            max_defect: cert.max_defect,
            max_propagation: cert.max_propagation,
            eps_eff: cert.eps_eff,
            interpolation_complete: cert.interpolation_complete,
            verdict: if cert.accepted { "accepted" } else { "rejected" },
            sample_count: cert.samples.len(),
            per_sample: cert.per_sample.clone(),
            step_norms: cert.step_norms.clone(),
            space: first.space().to_file(),
            fiber_dim: first.fiber_dim(),
            samples,
        }
    }
}
