use std::collections::BTreeMap;

use num_traits::Zero;

use super::{FiniteMetricSpace, SpaceError};
use crate::Rat;

pub const DEFAULT_MAX_DIM: usize = 3;

/// Rips complex at scale `s`: simplices are the point sets of pairwise
/// distance at most `s`, listed up to `max_dim`.
#[derive(Debug, Clone)]
pub struct RipsComplex {
    base: FiniteMetricSpace,
    scale: Rat,
    max_dim: usize,
    simplices: Vec<Vec<usize>>,
}

impl RipsComplex {
    pub fn base(&self) -> &FiniteMetricSpace {
        &self.base
    }

    pub fn scale(&self) -> Rat {
        self.scale
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Simplices sorted by dimension, then lexicographically.
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn simplices_of_dim(&self, k: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().filter(move |s| s.len() == k + 1)
    }

    /// Exact membership test, independent of the stored dimension cap.
    pub fn is_simplex(&self, vertices: &[usize]) -> bool {
        is_simplex_at(&self.base, self.scale, vertices)
    }

    /// Vertex and barycenter samples for every listed simplex.
    pub fn barycenters(&self) -> Vec<RipsPoint> {
        self.simplices
            .iter()
            .map(|s| RipsPoint::barycenter(&self.base, self.scale, s).expect("listed simplex"))
            .collect()
    }
}

pub(crate) fn is_simplex_at(space: &FiniteMetricSpace, s: Rat, vertices: &[usize]) -> bool {
    if vertices.is_empty() || vertices.iter().any(|&v| v >= space.len()) {
        return false;
    }
    vertices.iter().enumerate().all(|(i, &a)| vertices[i + 1..].iter().all(|&b| space.dist(a, b) <= s))
}

pub fn rips(space: &FiniteMetricSpace, s: Rat) -> Result<RipsComplex, SpaceError> {
    rips_with_max_dim(space, s, DEFAULT_MAX_DIM)
}

pub fn rips_with_max_dim(space: &FiniteMetricSpace, s: Rat, max_dim: usize) -> Result<RipsComplex, SpaceError> {
    if s < Rat::zero() {
        return Err(SpaceError::NegativeScale);
    }
    let n = space.len();
    let mut by_dim: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|v| vec![v]).collect()];
    for k in 1..=max_dim {
        let mut next = Vec::new();
        for simplex in &by_dim[k - 1] {
            let last = *simplex.last().unwrap();
            for v in last + 1..n {
                if simplex.iter().all(|&u| space.dist(u, v) <= s) {
                    let mut t = simplex.clone();
                    t.push(v);
                    next.push(t);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        by_dim.push(next);
    }
    Ok(RipsComplex { base: space.clone(), scale: s, max_dim, simplices: by_dim.into_iter().flatten().collect() })
}

/// A point of the Rips complex as a finite convex combination of Dirac
/// measures. The weights are the coordinate functions evaluated at the point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RipsPoint {
    scale: Rat,
    weights: BTreeMap<usize, Rat>,
}

impl RipsPoint {
    pub fn new(space: &FiniteMetricSpace, scale: Rat, weights: BTreeMap<usize, Rat>) -> Result<Self, SpaceError> {
        let zero = Rat::zero();
        let weights: BTreeMap<usize, Rat> = weights.into_iter().filter(|(_, w)| *w != zero).collect();
        if weights.values().any(|w| *w < zero || *w > Rat::from_integer(1)) {
            return Err(SpaceError::BadWeights);
        }
        let total: Rat = weights.values().copied().sum();
        if total != Rat::from_integer(1) {
            return Err(SpaceError::BadWeights);
        }
        if let Some(&v) = weights.keys().find(|&&v| v >= space.len()) {
            return Err(SpaceError::PointOutOfRange(v));
        }
        let support: Vec<usize> = weights.keys().copied().collect();
        if !is_simplex_at(space, scale, &support) {
            return Err(SpaceError::NotASimplex(scale));
        }
        Ok(Self { scale, weights })
    }

    /// Dirac measure at `v`.
    pub fn vertex(space: &FiniteMetricSpace, scale: Rat, v: usize) -> Result<Self, SpaceError> {
        Self::new(space, scale, BTreeMap::from([(v, Rat::from_integer(1))]))
    }

    pub fn barycenter(space: &FiniteMetricSpace, scale: Rat, simplex: &[usize]) -> Result<Self, SpaceError> {
        let w = Rat::new(1, simplex.len() as i64);
        Self::new(space, scale, simplex.iter().map(|&v| (v, w)).collect())
    }

    pub fn scale(&self) -> Rat {
        self.scale
    }

    /// Coordinate function `lambda_v` at this point.
    pub fn lambda(&self, v: usize) -> Rat {
        self.weights.get(&v).copied().unwrap_or_else(Rat::zero)
    }

    pub fn weights(&self) -> &BTreeMap<usize, Rat> {
        &self.weights
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights.keys().copied().collect()
    }

    /// Push-forward along a point map (used for group translates).
    pub fn map_points(&self, f: impl Fn(usize) -> usize) -> Self {
        let mut weights = BTreeMap::new();
        for (&v, &w) in &self.weights {
            *weights.entry(f(v)).or_insert_with(Rat::zero) += w;
        }
        Self { scale: self.scale, weights }
    }
}

/// Re-hosts a point of the scale-`s` complex in the scale-`s'` complex.
pub fn rips_inclusion(x: &RipsPoint, target_scale: Rat) -> Result<RipsPoint, SpaceError> {
    if target_scale < x.scale {
        return Err(SpaceError::ScaleDecrease { from: x.scale, to: target_scale });
    }
    Ok(RipsPoint { scale: target_scale, weights: x.weights.clone() })
}
