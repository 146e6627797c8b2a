use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{validate_space, FiniteMetricSpace, SpaceError};
use crate::Rat;

/// A finite group given by its Cayley table `mul[g][h] = g * h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    pub fn from_cayley(mul: Vec<Vec<usize>>) -> Result<Self, SpaceError> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(SpaceError::InvalidGroup("table must be square with entries in range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| mul[e][g] == g && mul[g][e] == g))
            .ok_or_else(|| SpaceError::InvalidGroup("no identity element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| mul[g][h] == identity && mul[h][g] == identity)
                .ok_or_else(|| SpaceError::InvalidGroup(format!("element {g} has no inverse")))?;
            inverse.push(inv);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(SpaceError::InvalidGroup(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(Self { mul, identity, inverse })
    }

    /// `Z/n` with `k` the class of `k`.
    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_cayley(mul).expect("cyclic group")
    }

    /// The symmetric group on three letters, elements listed as permutations
    /// in lexicographic order (index 0 is the identity).
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mul = perms.iter().map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect()).collect();
        Self::from_cayley(mul).expect("S3")
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.mul[g][h]
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.mul
    }

    /// Word lengths with respect to `gens` by breadth-first search.
    pub fn word_lengths(&self, gens: &[usize]) -> Result<Vec<usize>, SpaceError> {
        let n = self.order();
        if gens.iter().any(|&g| g >= n) {
            return Err(SpaceError::InvalidGroup("generator out of range".into()));
        }
        if gens.iter().any(|&g| !gens.contains(&self.inv(g))) {
            return Err(SpaceError::NotSymmetric);
        }
        let mut len = vec![usize::MAX; n];
        len[self.identity] = 0;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul(g, s);
                if len[h] == usize::MAX {
                    len[h] = len[g] + 1;
                    queue.push_back(h);
                }
            }
        }
        if len.contains(&usize::MAX) {
            return Err(SpaceError::NotGenerating);
        }
        Ok(len)
    }

    /// Left regular action on itself, `act(g, h) = g h`.
    pub fn left_translation(&self) -> Vec<Vec<usize>> {
        self.mul.clone()
    }
}

fn group_space(group: &FiniteGroup, lengths: &[usize], right: bool) -> Result<FiniteMetricSpace, SpaceError> {
    let n = group.order();
    let labels = (0..n).map(|g| format!("g{g}")).collect();
    let dist = (0..n)
        .map(|g| {
            (0..n)
                .map(|h| {
                    let w = if right { group.mul(g, group.inv(h)) } else { group.mul(group.inv(g), h) };
                    Rat::from_integer(lengths[w] as i64)
                })
                .collect()
        })
        .collect();
    validate_space(labels, dist)
}

/// Left-invariant word metric `d(g, h) = |g^-1 h|` together with the free
/// left translation action.
pub fn word_metric(group: &FiniteGroup, gens: &[usize]) -> Result<(FiniteMetricSpace, GroupAction), SpaceError> {
    let lengths = group.word_lengths(gens)?;
    let space = group_space(group, &lengths, false)?;
    let action = GroupAction::new(group.clone(), group.left_translation(), true, &space)?;
    Ok((space, action))
}

/// Right-invariant word metric `d(g, h) = |g h^-1|`. In the regular
/// representation of a crossed product, the coefficient of `u_gamma` sits on
/// the blocks `(g, h)` with `g h^-1 = gamma`, so this is the metric whose
/// propagation matches the crossed-product filtration.
pub fn word_metric_right(group: &FiniteGroup, gens: &[usize]) -> Result<FiniteMetricSpace, SpaceError> {
    let lengths = group.word_lengths(gens)?;
    group_space(group, &lengths, true)
}

/// Action of a finite group on the points of a finite metric space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    group: FiniteGroup,
    act: Vec<Vec<usize>>,
    free: bool,
}

impl GroupAction {
    /// Validates the action axioms, isometry and (when flagged) freeness.
    pub fn new(
        group: FiniteGroup,
        act: Vec<Vec<usize>>,
        free: bool,
        space: &FiniteMetricSpace,
    ) -> Result<Self, SpaceError> {
        let n = space.len();
        let err = |m: String| SpaceError::InvalidAction(m);
        if act.len() != group.order() || act.iter().any(|row| row.len() != n || row.iter().any(|&y| y >= n)) {
            return Err(err("act table must be |G| x |points| with entries in range".into()));
        }
        for (g, row) in act.iter().enumerate() {
            let mut seen = vec![false; n];
            for &y in row {
                if std::mem::replace(&mut seen[y], true) {
                    return Err(err(format!("element {g} does not act bijectively")));
                }
            }
        }
        if (0..n).any(|x| act[group.identity()][x] != x) {
            return Err(err("identity does not act trivially".into()));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                for x in 0..n {
                    if act[group.mul(g, h)][x] != act[g][act[h][x]] {
                        return Err(err(format!("composition fails for ({g}, {h}) at {x}")));
                    }
                }
            }
            for x in 0..n {
                for y in 0..n {
                    if space.dist(act[g][x], act[g][y]) != space.dist(x, y) {
                        return Err(err(format!("element {g} is not an isometry")));
                    }
                }
            }
            if free && g != group.identity() && (0..n).any(|x| act[g][x] == x) {
                return Err(err(format!("element {g} has a fixed point")));
            }
        }
        Ok(Self { group, act, free })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.act[g][x]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.act
    }

    pub fn is_free(&self) -> bool {
        self.free
    }

    pub fn point_count(&self) -> usize {
        self.act.first().map_or(0, Vec::len)
    }

    pub fn to_file(&self) -> ActionFile {
        ActionFile {
            schema: Some("action.v1".into()),
            cayley: self.group.cayley().to_vec(),
            act: self.act.clone(),
            free: self.free,
        }
    }

    pub fn from_file(file: &ActionFile, space: &FiniteMetricSpace) -> Result<Self, SpaceError> {
        Self::new(FiniteGroup::from_cayley(file.cayley.clone())?, file.act.clone(), file.free, space)
    }
}

/// On-disk form of an action (`action.v1`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ActionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub cayley: Vec<Vec<usize>>,
    pub act: Vec<Vec<usize>>,
    pub free: bool,
}
