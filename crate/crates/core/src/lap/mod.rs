//! Linear assignment: dense Jonker-Volgenant and a sparse shortest augmenting path solver.

mod jv;
mod lapmod;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Min,
    Max,
}

/// Which solver to use. `Auto` picks the sparse solver when fewer than half the entries are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LapMethod {
    #[default]
    Dense,
    Sparse,
    Auto,
}

impl std::str::FromStr for LapMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" | "lapjv" | "jv" => Ok(LapMethod::Dense),
            "sparse" | "lapmod" => Ok(LapMethod::Sparse),
            "auto" => Ok(LapMethod::Auto),
            other => Err(Error::InvalidArgument(format!("unknown lap method {other:?}"))),
        }
    }
}

impl std::fmt::Display for LapMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LapMethod::Dense => "dense",
            LapMethod::Sparse => "sparse",
            LapMethod::Auto => "auto",
        })
    }
}

/// Cost (or profit) matrix. Sparse storage forbids every entry that is not stored.
#[derive(Debug, Clone, PartialEq)]
pub enum CostMatrix {
    Dense(DMatrix<f64>),
    Sparse {
        nrows: usize,
        ncols: usize,
        rows: Vec<Vec<(usize, f64)>>,
    },
}

impl CostMatrix {
    pub fn dense(m: DMatrix<f64>) -> Self {
        CostMatrix::Dense(m)
    }

    /// Sparse cost from `(row, col, value)` entries; explicit zeros are kept as stored entries.
    pub fn sparse(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); nrows];
        for (i, j, v) in entries {
            if i >= nrows || j >= ncols {
                return Err(Error::Dimension(format!(
                    "entry ({i}, {j}) outside {nrows}x{ncols} cost matrix"
                )));
            }
            rows[i].push((j, v));
        }
        for (i, r) in rows.iter_mut().enumerate() {
            r.sort_by_key(|e| e.0);
            if let Some(w) = r.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate cost entry ({i}, {})",
                    w[0].0
                )));
            }
        }
        Ok(CostMatrix::Sparse { nrows, ncols, rows })
    }

    pub fn nrows(&self) -> usize {
        match self {
            CostMatrix::Dense(m) => m.nrows(),
            CostMatrix::Sparse { nrows, .. } => *nrows,
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            CostMatrix::Dense(m) => m.ncols(),
            CostMatrix::Sparse { ncols, .. } => *ncols,
        }
    }

    pub fn stored(&self) -> usize {
        match self {
            CostMatrix::Dense(m) => m.len(),
            CostMatrix::Sparse { rows, .. } => rows.iter().map(Vec::len).sum(),
        }
    }

    pub fn density(&self) -> f64 {
        self.stored() as f64 / ((self.nrows() * self.ncols()).max(1)) as f64
    }

    /// Entry `(i, j)` when present.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        match self {
            CostMatrix::Dense(m) => Some(m[(i, j)]),
            CostMatrix::Sparse { rows, .. } => rows[i]
                .binary_search_by_key(&j, |e| e.0)
                .ok()
                .map(|k| rows[i][k].1),
        }
    }

    fn check_finite(&self) -> Result<()> {
        let bad = match self {
            CostMatrix::Dense(m) => m
                .row_iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)).collect::<Vec<_>>())
                .find(|e| !e.2.is_finite()),
            CostMatrix::Sparse { rows, .. } => rows
                .iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().map(move |&(j, v)| (i, j, v)))
                .find(|e| !e.2.is_finite()),
        };
        match bad {
            Some((row, col, value)) => Err(Error::NonFinite { row, col, value }),
            None => Ok(()),
        }
    }

    fn check_shape(&self) -> Result<()> {
        if self.nrows() > self.ncols() {
            return Err(Error::Dimension(format!(
                "cost matrix has more rows ({}) than columns ({}); transpose or pad first",
                self.nrows(),
                self.ncols()
            )));
        }
        Ok(())
    }

    fn max_abs(&self) -> f64 {
        match self {
            CostMatrix::Dense(m) => m.amax(),
            CostMatrix::Sparse { rows, .. } => rows
                .iter()
                .flatten()
                .fold(0.0, |a: f64, e| a.max(e.1.abs())),
        }
    }
}

/// Result of a linear assignment: row `i` is assigned column `mapping[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub mapping: Vec<usize>,
    pub objective: f64,
    /// Solver that actually ran.
    pub method: LapMethod,
}

/// Dense solve. Rectangular inputs (`nrows < ncols`) get sentinel rows appended.
pub fn solve_lap_dense(c: &CostMatrix, sense: Sense) -> Result<Assignment> {
    let CostMatrix::Dense(m) = c else {
        return Err(Error::InvalidArgument(
            "solve_lap_dense needs dense storage".into(),
        ));
    };
    c.check_finite()?;
    c.check_shape()?;
    let (nr, nc) = (m.nrows(), m.ncols());
    let sign = if sense == Sense::Max { -1.0 } else { 1.0 };
    let sentinel = m.amax() * nc as f64 + 1.0;
    let square = DMatrix::from_fn(nc, nc, |i, j| {
        if i < nr {
            sign * m[(i, j)]
        } else {
            sentinel
        }
    });
    let mut mapping = jv::solve(&square);
    mapping.truncate(nr);
    let objective = mapping.iter().enumerate().map(|(i, &j)| m[(i, j)]).sum();
    Ok(Assignment {
        mapping,
        objective,
        method: LapMethod::Dense,
    })
}

/// Sparse solve over stored entries only; fails when no complete assignment exists.
pub fn solve_lap_sparse(c: &CostMatrix, sense: Sense) -> Result<Assignment> {
    let CostMatrix::Sparse { ncols, rows, .. } = c else {
        return Err(Error::InvalidArgument(
            "solve_lap_sparse needs sparse storage".into(),
        ));
    };
    c.check_finite()?;
    c.check_shape()?;
    let signed: Vec<Vec<(usize, f64)>> = match sense {
        Sense::Min => rows.clone(),
        Sense::Max => rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| (j, -v)).collect())
            .collect(),
    };
    let mapping = lapmod::solve(&signed, *ncols)?;
    let objective = mapping
        .iter()
        .enumerate()
        .map(|(i, &j)| c.get(i, j).expect("assigned entry is stored"))
        .sum();
    Ok(Assignment {
        mapping,
        objective,
        method: LapMethod::Sparse,
    })
}

/// Dispatches to a solver, converting storage when the requested method needs it.
///
/// Dense storage sent to the sparse solver keeps only nonzero entries. Sparse storage sent
/// to the dense solver fills absent entries with a prohibitive value; an assignment that still
/// needs one of them is reported as infeasible.
pub fn do_lap(c: &CostMatrix, method: LapMethod, sense: Sense) -> Result<Assignment> {
    let method = match method {
        LapMethod::Auto if c.density() < 0.5 => LapMethod::Sparse,
        LapMethod::Auto => LapMethod::Dense,
        m => m,
    };
    match (method, c) {
        (LapMethod::Dense, CostMatrix::Dense(_)) => solve_lap_dense(c, sense),
        (LapMethod::Sparse, CostMatrix::Sparse { .. }) => solve_lap_sparse(c, sense),
        (LapMethod::Sparse, CostMatrix::Dense(m)) => {
            let entries = m
                .row_iter()
                .enumerate()
                .flat_map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .filter(|e| *e.1 != 0.0)
                        .map(|(j, &v)| (i, j, v))
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>();
            solve_lap_sparse(&CostMatrix::sparse(m.nrows(), m.ncols(), entries)?, sense)
        }
        (_, CostMatrix::Sparse { nrows, ncols, rows }) => {
            c.check_finite()?;
            let n = (*nrows).max(*ncols);
            // any assignment touching a forbidden entry is worse than every feasible one
            let big = c.max_abs() * 2.0 * n as f64 + 1.0;
            let forbidden = if sense == Sense::Max { -big } else { big };
            let mut dense = DMatrix::from_element(*nrows, *ncols, forbidden);
            for (i, r) in rows.iter().enumerate() {
                for &(j, v) in r {
                    dense[(i, j)] = v;
                }
            }
            let a = solve_lap_dense(&CostMatrix::Dense(dense), sense)?;
            if let Some(i) = a.mapping.iter().enumerate().position(|(i, &j)| c.get(i, j).is_none()) {
                return Err(Error::Infeasible(i));
            }
            let objective = a
                .mapping
                .iter()
                .enumerate()
                .map(|(i, &j)| c.get(i, j).expect("checked above"))
                .sum();
            Ok(Assignment { objective, ..a })
        }
        (LapMethod::Auto, _) => unreachable!("auto resolved above"),
    }
}

/// Convenience wrapper: maximize `trace(Pᵀ·profit)` over permutations with the dense solver
/// (or the requested one), for square or wide profit matrices.
pub fn maximize(profit: &DMatrix<f64>, method: LapMethod) -> Result<Assignment> {
    do_lap(&CostMatrix::Dense(profit.clone()), method, Sense::Max)
}
