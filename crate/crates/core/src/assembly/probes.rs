use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::AssemblyError;
use crate::coarse_space::FiniteMetricSpace;
use crate::filtered_matrix::FilteredMatrix;
use crate::homotopy::{connect_projections, ConnectOptions, HomotopyError};
use crate::quant_k::{check_quasi_projection, kappa0, QuasiProjection};
use crate::rational::serde_rat;
use crate::Rat;

/// Scope line carried by every probe report.
pub const SCOPE_NOTE: &str = "scope: degree-0 evaluation shadow of the local assembly map (vertex classes and their \
integer combinations over components of the Rips complex); no KK-theoretic assembly is computed";

/// When the difference of two vertex classes dies in the Rips complex at scale `d'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeCriterion {
    /// The two vertices span an edge of `P_{d'}`.
    #[default]
    DirectEdge,
    /// The two vertices lie in one connected component of `P_{d'}`.
    Component,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairVerdict {
    pub a: usize,
    pub b: usize,
    #[serde(with = "serde_rat")]
    pub distance: Rat,
    /// `[e_aa] - [e_bb]` vanishes at `(eps, r)`.
    pub vanishes: bool,
    /// Interpolation bound of the connecting certificate.
    pub eps_eff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QiReport {
    pub statement: &'static str,
    pub scope: &'static str,
    #[serde(with = "serde_rat")]
    pub d: Rat,
    #[serde(with = "serde_rat")]
    pub r: Rat,
    pub eps: f64,
    pub criterion: MergeCriterion,
    #[serde(serialize_with = "rat_seq")]
    pub d_prime_schedule: Vec<Rat>,
    /// Per scheduled `d'`: every vanishing difference is killed at `d'`.
    pub holds: Vec<bool>,
    pub pairs: Vec<PairVerdict>,
    #[serde(serialize_with = "rat_opt")]
    pub minimal_d_prime: Option<Rat>,
}

fn rat_seq<S: serde::Serializer>(rs: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(crate::rational::format_rat))
}

fn rat_opt<S: serde::Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&crate::rational::format_rat(r)),
        None => s.serialize_none(),
    }
}

fn ascending(xs: &[Rat]) -> bool {
    !xs.is_empty() && xs.windows(2).all(|w| w[0] < w[1])
}

fn vertex_projection(space: &Arc<FiniteMetricSpace>, v: usize, eps: f64) -> Result<QuasiProjection, AssemblyError> {
    let e = FilteredMatrix::matrix_unit(space.clone(), 1, v, v, 0, 0);
    Ok(check_quasi_projection(&e, eps, Rat::from_integer(0))?)
}

fn killed(space: &FiniteMetricSpace, criterion: MergeCriterion, a: usize, b: usize, d_prime: Rat) -> bool {
    match criterion {
        MergeCriterion::DirectEdge => space.dist(a, b) <= d_prime,
        MergeCriterion::Component => space.components_at(d_prime).iter().any(|c| c.contains(&a) && c.contains(&b)),
    }
}

/// Quantitative injectivity probe.
///
/// For every pair of vertices not already identified in `P_d`, the
/// difference of their vertex assembly classes is tested for vanishing at
/// `(eps, r)` by a connecting homotopy of budget `r`. The report gives the
/// smallest scheduled `d' >= d` at which every vanishing difference is also
/// killed by the inclusion `P_d -> P_{d'}`.
pub fn qi_probe(
    space: &Arc<FiniteMetricSpace>,
    d: Rat,
    r: Rat,
    eps: f64,
    schedule: &[Rat],
    criterion: MergeCriterion,
    opts: &ConnectOptions,
) -> Result<QiReport, AssemblyError> {
    if !ascending(schedule) {
        return Err(AssemblyError::InvalidSchedule);
    }
    let n = space.len();
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !killed(space, criterion, a, b, d))
        .collect();
    let pairs = candidates
        .par_iter()
        .map(|&(a, b)| -> Result<PairVerdict, AssemblyError> {
            let (pa, pb) = (vertex_projection(space, a, eps)?, vertex_projection(space, b, eps)?);
            let outcome = connect_projections(&pa, &pb, r, eps, opts);
            let (vanishes, eps_eff) = match outcome {
                Ok(cert) => (true, Some(cert.eps_eff)),
                Err(HomotopyError::BudgetInfeasible { .. } | HomotopyError::RefinementLimit { .. }) => (false, None),
                Err(e) => return Err(e.into()),
            };
            Ok(PairVerdict { a, b, distance: space.dist(a, b), vanishes, eps_eff })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let holds: Vec<bool> = schedule
        .iter()
        .map(|&dp| dp >= d && pairs.iter().filter(|p| p.vanishes).all(|p| killed(space, criterion, p.a, p.b, dp)))
        .collect();
    let minimal_d_prime = schedule.iter().zip(&holds).find(|(_, &h)| h).map(|(&dp, _)| dp);
    Ok(QiReport {
        statement: "QI",
        scope: SCOPE_NOTE,
        d,
        r,
        eps,
        criterion,
        d_prime_schedule: schedule.to_vec(),
        holds,
        pairs,
        minimal_d_prime,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QsCell {
    #[serde(with = "serde_rat")]
    pub d: Rat,
    #[serde(with = "serde_rat")]
    pub r: Rat,
    pub verdict: &'static str,
    /// Rank of the rounded target on each component of `P_d`.
    pub component_ranks: Vec<usize>,
    /// Chosen `(point, fiber)` slots of the assembly representative.
    pub slots: Vec<(usize, usize)>,
    pub eps_eff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QsReport {
    pub statement: &'static str,
    pub scope: &'static str,
    pub eps: f64,
    #[serde(serialize_with = "rat_seq")]
    pub d_schedule: Vec<Rat>,
    #[serde(serialize_with = "rat_seq")]
    pub r_schedule: Vec<Rat>,
    pub cells: Vec<QsCell>,
    #[serde(serialize_with = "rat_pair_opt")]
    pub minimal: Option<(Rat, Rat)>,
}

fn rat_pair_opt<S: serde::Serializer>(r: &Option<(Rat, Rat)>, s: S) -> Result<S::Ok, S::Error> {
    use crate::rational::format_rat;
    match r {
        Some((d, r)) => s.serialize_some(&[format_rat(d), format_rat(r)]),
        None => s.serialize_none(),
    }
}

/// Above this many slot combinations only the greedy choice is tried.
const MAX_COMBINATIONS: usize = 2000;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Quantitative surjectivity probe.
///
/// For each `(d, r)` cell, the rank of `kappa0(y)` on every component of
/// `P_d` fixes how many vertex classes each component contributes; the
/// probe searches over choices of vertex slots for a representative that
/// connects to `y` at `(eps, r)`.
pub fn qs_probe(
    y: &QuasiProjection,
    d_schedule: &[Rat],
    r_schedule: &[Rat],
    eps: f64,
    opts: &ConnectOptions,
) -> Result<QsReport, AssemblyError> {
    if !ascending(d_schedule) || !ascending(r_schedule) {
        return Err(AssemblyError::InvalidSchedule);
    }
    let space = y.matrix.space_arc().clone();
    let m = y.matrix.fiber_dim();
    let rounded = kappa0(y)?.projection;
    let diag: Vec<f64> = (0..space.len() * m).map(|i| rounded.entries()[(i, i)].re).collect();

    let coords: Vec<(usize, usize)> =
        (0..d_schedule.len()).flat_map(|i| (0..r_schedule.len()).map(move |j| (i, j))).collect();
    let cells = coords
        .par_iter()
        .map(|&(i, j)| qs_cell(y, &space, m, &diag, d_schedule[i], r_schedule[j], eps, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let minimal = cells.iter().find(|c| c.verdict == "certified").map(|c| (c.d, c.r));
    Ok(QsReport {
        statement: "QS",
        scope: SCOPE_NOTE,
        eps,
        d_schedule: d_schedule.to_vec(),
        r_schedule: r_schedule.to_vec(),
        cells,
        minimal,
    })
}

#[allow(clippy::too_many_arguments)]
fn qs_cell(
    y: &QuasiProjection,
    space: &Arc<FiniteMetricSpace>,
    m: usize,
    diag: &[f64],
    d: Rat,
    r: Rat,
    eps: f64,
    opts: &ConnectOptions,
) -> Result<QsCell, AssemblyError> {
    let comps = space.components_at(d);
    let slots_of = |c: &Vec<usize>| -> Vec<usize> { c.iter().flat_map(|&x| (0..m).map(move |f| x * m + f)).collect() };
    let ranks: Vec<usize> =
        comps.iter().map(|c| slots_of(c).iter().map(|&i| diag[i]).sum::<f64>().round().max(0.0) as usize).collect();
    let mut cell =
        QsCell { d, r, verdict: "out-of-range", component_ranks: ranks.clone(), slots: vec![], eps_eff: None };
    if r < y.r || eps < y.eps || eps >= 0.25 {
        return Ok(cell);
    }
    let per_comp: Vec<Vec<usize>> = comps.iter().map(slots_of).collect();
    if per_comp.iter().zip(&ranks).any(|(s, &k)| k > s.len()) {
        cell.verdict = "rank-overflow";
        return Ok(cell);
    }

    // greedy choice first: largest diagonal weight, ties to the lower index
    let greedy: Vec<Vec<usize>> = per_comp
        .iter()
        .zip(&ranks)
        .map(|(s, &k)| {
            let mut idx: Vec<usize> = (0..s.len()).collect();
            idx.sort_by(|&a, &b| diag[s[b]].total_cmp(&diag[s[a]]).then(a.cmp(&b)));
            let mut pick = idx[..k].to_vec();
            pick.sort_unstable();
            pick
        })
        .collect();
    let total = per_comp.iter().zip(&ranks).fold(1usize, |acc, (s, &k)| acc.saturating_mul(binomial(s.len(), k)));
    let mut choices = vec![greedy.clone()];
    if total <= MAX_COMBINATIONS {
        let options: Vec<Vec<Vec<usize>>> =
            per_comp.iter().zip(&ranks).map(|(s, &k)| combinations(s.len(), k)).collect();
        let mut counter = vec![0usize; options.len()];
        loop {
            let choice: Vec<Vec<usize>> = counter.iter().zip(&options).map(|(&c, o)| o[c].clone()).collect();
            if choice != greedy {
                choices.push(choice);
            }
            let mut pos = 0;
            while pos < counter.len() {
                counter[pos] += 1;
                if counter[pos] < options[pos].len() {
                    break;
                }
                counter[pos] = 0;
                pos += 1;
            }
            if pos == counter.len() {
                break;
            }
        }
    }

    cell.verdict = "not-found";
    for choice in choices {
        let mut d_entries = vec![0.0; space.len() * m];
        let mut slots = Vec::new();
        for (s, pick) in per_comp.iter().zip(&choice) {
            for &k in pick {
                d_entries[s[k]] = 1.0;
                slots.push((s[k] / m, s[k] % m));
            }
        }
        slots.sort_unstable();
        let rep = FilteredMatrix::diagonal(space.clone(), m, &d_entries)?;
        let rep = check_quasi_projection(&rep, y.eps, Rat::from_integer(0))?;
        match connect_projections(&rep, y, r, eps, opts) {
            Ok(cert) => {
                cell.verdict = "certified";
                cell.slots = slots;
                cell.eps_eff = Some(cert.eps_eff);
                return Ok(cell);
            }
            Err(HomotopyError::BudgetInfeasible { .. } | HomotopyError::RefinementLimit { .. }) => {}
            Err(HomotopyError::RankMismatch { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(cell)
}
