use rayon::prelude::*;
use serde::Serialize;

use super::{connect_projections, ConnectOptions, HomotopyError};
use crate::quant_k::{check_quasi_projection, kappa0, standard_trivial, ClassRep, QuantClass};
use crate::rational::{format_rat, serde_rat};
use crate::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellVerdict {
    /// A certificate was produced for this cell.
    Certified,
    /// No search was needed: a smaller cell was certified.
    Implied,
    NotFound,
    /// The sample refinement limit was reached.
    Timeout,
    /// `(eps', r')` lies below the class parameters.
    OutOfRange,
}

impl CellVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            CellVerdict::Certified => "certified",
            CellVerdict::Implied => "implied",
            CellVerdict::NotFound => "not-found",
            CellVerdict::Timeout => "timeout",
            CellVerdict::OutOfRange => "out-of-range",
        }
    }

    pub fn is_certified(self) -> bool {
        matches!(self, CellVerdict::Certified | CellVerdict::Implied)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceCell {
    pub eps: f64,
    #[serde(with = "serde_rat")]
    pub r: Rat,
    pub verdict: CellVerdict,
    pub eps_eff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceProfile {
    pub class_id: String,
    pub eps_grid: Vec<f64>,
    #[serde(serialize_with = "serialize_rats")]
    pub r_grid: Vec<Rat>,
    /// Row-major: all `r'` for the first `eps'`, then the next.
    pub cells: Vec<PersistenceCell>,
}

fn serialize_rats<S: serde::Serializer>(rs: &[Rat], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(format_rat))
}

impl PersistenceProfile {
    pub fn cell(&self, i: usize, j: usize) -> &PersistenceCell {
        &self.cells[i * self.r_grid.len() + j]
    }

    /// Smallest certified `r'` for each `eps'`.
    pub fn min_certified_r(&self) -> Vec<Option<Rat>> {
        (0..self.eps_grid.len())
            .map(|i| (0..self.r_grid.len()).find(|&j| self.cell(i, j).verdict.is_certified()).map(|j| self.r_grid[j]))
            .collect()
    }

    /// CSV with columns `eps_prime, r_prime, verdict, min_certified_r_prime`.
    pub fn to_csv(&self) -> String {
        let mins = self.min_certified_r();
        let mut out = String::from("eps_prime,r_prime,verdict,min_certified_r_prime\n");
        for (i, &eps) in self.eps_grid.iter().enumerate() {
            let min = mins[i].map(|r| format_rat(&r)).unwrap_or_default();
            for (j, r) in self.r_grid.iter().enumerate() {
                out.push_str(&format!("{eps},{},{},{min}\n", format_rat(r), self.cell(i, j).verdict.as_str()));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileOptions {
    pub class_id: String,
    pub connect: ConnectOptions,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self { class_id: String::new(), connect: ConnectOptions::default(), jobs: None }
    }
}

fn strictly_ascending<T: PartialOrd>(xs: &[T]) -> bool {
    !xs.is_empty() && xs.windows(2).all(|w| w[0] < w[1])
}

/// Probes, for every `(eps', r')` on the grid, whether the degree-0 class
/// `[p, l]` connects to the standard trivial representative `[I_l (+) 0, l]`.
///
/// Cells are independent and searched in parallel; the grid is then closed
/// upward so that a certified cell certifies every cell with larger
/// coordinates.
pub fn persistence_radius(
    class: &QuantClass,
    eps_grid: &[f64],
    r_grid: &[Rat],
    opts: &ProfileOptions,
) -> Result<PersistenceProfile, HomotopyError> {
    let ClassRep::Even { p, l } = &class.rep else {
        return Err(HomotopyError::WrongDegree);
    };
    if !strictly_ascending(eps_grid) || !strictly_ascending(r_grid) || eps_grid.iter().any(|e| !e.is_finite()) {
        return Err(HomotopyError::InvalidSchedule);
    }
    let rank = kappa0(p)?.rank;
    if rank != *l {
        return Err(HomotopyError::NotNullInK0 { rank, l: *l });
    }
    let target_matrix = standard_trivial(p.matrix.space_arc().clone(), p.matrix.fiber_dim(), *l);
    let target = check_quasi_projection(&target_matrix, class.eps, Rat::from_integer(0))?;

    let coords: Vec<(usize, usize)> =
        (0..eps_grid.len()).flat_map(|i| (0..r_grid.len()).map(move |j| (i, j))).collect();
    let search = |&(i, j): &(usize, usize)| -> Result<PersistenceCell, HomotopyError> {
        let (eps, r) = (eps_grid[i], r_grid[j]);
        let mut cell = PersistenceCell { eps, r, verdict: CellVerdict::OutOfRange, eps_eff: None };
        if eps < class.eps || eps >= 0.25 || r < class.r {
            return Ok(cell);
        }
        match connect_projections(p, &target, r, eps, &opts.connect) {
            Ok(cert) => {
                cell.verdict = CellVerdict::Certified;
                cell.eps_eff = Some(cert.eps_eff);
            }
            Err(HomotopyError::BudgetInfeasible { .. }) => cell.verdict = CellVerdict::NotFound,
            Err(HomotopyError::RefinementLimit { .. }) => cell.verdict = CellVerdict::Timeout,
            Err(e) => return Err(e),
        }
        Ok(cell)
    };
    let run = || coords.par_iter().map(search).collect::<Result<Vec<_>, _>>();
    let mut cells = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool").install(run)?,
        None => run()?,
    };

    let cols = r_grid.len();
    for i in 0..eps_grid.len() {
        for j in 0..cols {
            if cells[i * cols + j].verdict.is_certified() {
                continue;
            }
            let below = i > 0 && cells[(i - 1) * cols + j].verdict.is_certified();
            let left = j > 0 && cells[i * cols + j - 1].verdict.is_certified();
            if below || left {
                cells[i * cols + j].verdict = CellVerdict::Implied;
            }
        }
    }

    Ok(PersistenceProfile {
        class_id: opts.class_id.clone(),
        eps_grid: eps_grid.to_vec(),
        r_grid: r_grid.to_vec(),
        cells,
    })
}
