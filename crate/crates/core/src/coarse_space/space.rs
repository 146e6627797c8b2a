use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::SpaceError;
use crate::rational::{format_rat, parse_rat};
use crate::Rat;

/// A finite metric space with an exact rational distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<Vec<Rat>>,
}

impl FiniteMetricSpace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> Rat {
        self.dist[x][y]
    }

    pub fn table(&self) -> &[Vec<Rat>] {
        &self.dist
    }

    pub fn diameter(&self) -> Rat {
        self.dist.iter().flat_map(|row| row.iter().copied()).max().unwrap_or_else(|| Rat::from_integer(0))
    }

    /// Closed ball `{y : d(x, y) <= r}`.
    pub fn ball(&self, x: usize, r: Rat) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.dist[x][y] <= r).collect()
    }

    /// Minimum distance between two disjoint point sets.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> Option<Rat> {
        a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| self.dist[x][y]).min()
    }

    /// Single point space, the desk-scale model of the scalars.
    pub fn point() -> Self {
        Self { points: vec!["*".into()], dist: vec![vec![Rat::from_integer(0)]] }
    }

    /// Unit-step path `0 - 1 - ... - (n-1)` with the graph metric.
    pub fn path(n: usize) -> Self {
        let points = (0..n).map(|i| format!("p{i}")).collect();
        let dist = (0..n).map(|i| (0..n).map(|j| Rat::from_integer((i as i64 - j as i64).abs())).collect()).collect();
        Self { points, dist }
    }

    /// Cycle of length `n` with unit edges and the geodesic metric.
    pub fn cycle(n: usize) -> Self {
        let points = (0..n).map(|i| format!("c{i}")).collect();
        let dist = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let k = (i as i64 - j as i64).rem_euclid(n as i64);
                        Rat::from_integer(k.min(n as i64 - k))
                    })
                    .collect()
            })
            .collect();
        Self { points, dist }
    }

    /// Two points at distance `rho`.
    pub fn two_point(rho: Rat) -> Result<Self, SpaceError> {
        let z = Rat::from_integer(0);
        validate_space(vec!["a".into(), "b".into()], vec![vec![z, rho], vec![rho, z]])
    }

    /// Subspace on the given indices, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> Self {
        Self {
            points: idx.iter().map(|&i| self.points[i].clone()).collect(),
            dist: idx.iter().map(|&i| idx.iter().map(|&j| self.dist[i][j]).collect()).collect(),
        }
    }

    /// Connected components of the graph `{x ~ y : d(x, y) <= s}`, each
    /// sorted, listed by smallest member.
    pub fn components_at(&self, s: Rat) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            label[start] = id;
            while let Some(x) = stack.pop() {
                members.push(x);
                for y in 0..n {
                    if label[y] == usize::MAX && self.dist[x][y] <= s {
                        label[y] = id;
                        stack.push(y);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    /// Same distances under new labels.
    pub fn relabel(&self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.len());
        Self { points: labels, dist: self.dist.clone() }
    }
}

/// Validates labels and a distance table and builds the space.
pub fn validate_space(points: Vec<String>, dist: Vec<Vec<Rat>>) -> Result<FiniteMetricSpace, SpaceError> {
    let n = points.len();
    if dist.len() != n || dist.iter().any(|row| row.len() != n) {
        return Err(SpaceError::ShapeMismatch(n));
    }
    let mut seen = HashSet::new();
    for p in &points {
        if !seen.insert(p.as_str()) {
            return Err(SpaceError::DuplicateLabel(p.clone()));
        }
    }
    let zero = Rat::from_integer(0);
    for x in 0..n {
        if dist[x][x] != zero {
            return Err(SpaceError::NonzeroDiagonal(x));
        }
        for y in 0..n {
            if dist[x][y] != dist[y][x] {
                return Err(SpaceError::AsymmetricTable(x, y));
            }
            if dist[x][y] < zero {
                return Err(SpaceError::NegativeDistance(x, y));
            }
            if x != y && dist[x][y] == zero {
                return Err(SpaceError::ZeroOffDiagonal(x.min(y), x.max(y)));
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if dist[x][z] > dist[x][y] + dist[y][z] {
                    return Err(SpaceError::TriangleViolation { x, y, z });
                }
            }
        }
    }
    Ok(FiniteMetricSpace { points, dist })
}

/// Largest closed-ball cardinality at radius `r`.
pub fn bounded_geometry_profile(space: &FiniteMetricSpace, r: Rat) -> usize {
    (0..space.len()).map(|x| space.ball(x, r).len()).max().unwrap_or(0)
}

/// Disjoint union of `components` (indexed from 1) with cross distance
/// between the `i`-th and `j`-th component equal to
/// `max(i + j, max(diam_i, diam_j) / 2)`.
///
/// A constant cross distance `D_ij` satisfies every triangle inequality iff
/// `D_ij >= diam/2` on both sides and `D_ik <= D_ij + D_jk`; the value above
/// is the least such constant not below `i + j`.
pub fn graph_space(components: &[FiniteMetricSpace]) -> Result<FiniteMetricSpace, SpaceError> {
    if components.len() == 1 {
        return Ok(components[0].clone());
    }
    let mut offsets = Vec::with_capacity(components.len());
    let mut total = 0;
    for c in components {
        offsets.push(total);
        total += c.len();
    }
    let zero = Rat::from_integer(0);
    let mut points = Vec::with_capacity(total);
    let mut dist = vec![vec![zero; total]; total];
    for (i, c) in components.iter().enumerate() {
        for label in c.labels() {
            points.push(format!("{}:{}", i + 1, label));
        }
    }
    for (i, ci) in components.iter().enumerate() {
        for (j, cj) in components.iter().enumerate() {
            let sep = if i == j {
                None
            } else {
                let floor = Rat::from_integer((i + j + 2) as i64);
                let half = ci.diameter().max(cj.diameter()) / Rat::from_integer(2);
                Some(floor.max(half))
            };
            for a in 0..ci.len() {
                for b in 0..cj.len() {
                    dist[offsets[i] + a][offsets[j] + b] = match sep {
                        None => ci.dist(a, b),
                        Some(s) => s,
                    };
                }
            }
        }
    }
    validate_space(points, dist)
}

/// On-disk form of a space (`space.v1`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpaceFile {
    #[serde(default = "space_schema", skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
}

fn space_schema() -> Option<String> {
    Some("space.v1".into())
}

impl FiniteMetricSpace {
    pub fn to_file(&self) -> SpaceFile {
        SpaceFile {
            schema: space_schema(),
            points: self.points.clone(),
            dist: self.dist.iter().map(|row| row.iter().map(format_rat).collect()).collect(),
        }
    }

    pub fn from_file(file: &SpaceFile) -> Result<Self, crate::io::IoError> {
        let dist = file
            .dist
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(validate_space(file.points.clone(), dist)?)
    }
}
