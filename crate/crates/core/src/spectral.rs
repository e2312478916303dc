//! IsoRank power iteration and Umeyama's eigenvector matching.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::frame::{make_match, Details, MatchResult, Partition, SeedSet};
use crate::graph::{Graph, Layers};
use crate::lap::{maximize, LapMethod};
use crate::matrix::Matrix;

/// How a score matrix is turned into a one-to-one correspondence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extraction {
    /// Repeatedly take the largest remaining entry (ties: smallest row, then column).
    Greedy,
    #[default]
    Lap,
}

impl std::str::FromStr for Extraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "greedy" => Ok(Extraction::Greedy),
            "lap" => Ok(Extraction::Lap),
            _ => Err(Error::InvalidArgument(format!("unknown extraction '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoRankConfig {
    pub max_iter: usize,
    /// Threshold on the entrywise L1 change between iterates.
    pub tol: f64,
    pub extraction: Extraction,
    pub lap_method: LapMethod,
}

impl Default for IsoRankConfig {
    fn default() -> Self {
        IsoRankConfig { max_iter: 50, tol: 1e-6, extraction: Extraction::Lap, lap_method: LapMethod::Dense }
    }
}

fn l1(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

fn check_layers(a: &Layers, b: &Layers) -> Result<()> {
    a.validate("A")?;
    b.validate("B")?;
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("A has {} layers but B has {}", a.len(), b.len())));
    }
    Ok(())
}

fn padded_similarity(s: &DMatrix<f64>, na: usize, nb: usize, n: usize) -> Result<DMatrix<f64>> {
    if (s.nrows(), s.ncols()) != (na, nb) && (s.nrows(), s.ncols()) != (n, n) {
        return Err(Error::Dimension(format!(
            "similarity is {}x{}, expected {na}x{nb}",
            s.nrows(),
            s.ncols()
        )));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("similarity has non-finite entries".into()));
    }
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((0, 0), (s.nrows(), s.ncols())).copy_from(s);
    Ok(out)
}

/// `I_s ⊕ (1/(n − s))·J` in original vertex order: ones on seed pairs, the barycenter elsewhere.
pub fn seed_similarity(seeds: &SeedSet, n: usize) -> DMatrix<f64> {
    let part = Partition::new(seeds, n);
    let mut s = DMatrix::zeros(n, n);
    for &(a, b) in seeds.pairs() {
        s[(a, b)] = 1.0;
    }
    let fill = 1.0 / part.n_free().max(1) as f64;
    for &i in &part.free_a {
        for &j in &part.free_b {
            s[(i, j)] = fill;
        }
    }
    s
}

/// Greedy extraction over the non-seed block: entries in descending order, ties by
/// `(row, column)`; returns pairs in the order taken.
fn greedy(d: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Vec<(usize, usize)> {
    let mut entries: Vec<(f64, usize, usize)> = Vec::with_capacity(rows.len() * cols.len());
    for &i in rows {
        for &j in cols {
            entries.push((d[(i, j)], i, j));
        }
    }
    entries.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let n = d.nrows().max(d.ncols());
    let (mut ua, mut ub) = (vec![false; n], vec![false; n]);
    let mut out = Vec::new();
    for (_, i, j) in entries {
        if !ua[i] && !ub[j] {
            ua[i] = true;
            ub[j] = true;
            out.push((i, j));
        }
    }
    out
}

fn lap_extract(d: &DMatrix<f64>, part: &Partition, method: LapMethod) -> Result<Vec<(usize, usize)>> {
    if part.n_free() == 0 {
        return Ok(Vec::new());
    }
    let block = d.select_rows(&part.free_a).select_columns(&part.free_b);
    let a = maximize(&block, method)?;
    Ok(a.mapping.iter().enumerate().map(|(i, &j)| (part.free_a[i], part.free_b[j])).collect())
}

/// Objective `Σ d[a, b]` over the given pairs.
pub fn extraction_score(d: &DMatrix<f64>, pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(a, b)| d[(a, b)]).sum()
}

/// IsoRank: power iteration on `D ← Σ Â D B̂ᵀ + E`, L1-normalized, with `Â`, `B̂` column-normalized
/// adjacencies and `E = S/||S||₁`.
///
/// Without a similarity, seeds supply one via [`seed_similarity`]; with neither, it is an error.
pub fn gm_isorank(
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    seeds: &SeedSet,
    similarity: Option<&DMatrix<f64>>,
    config: &IsoRankConfig,
) -> Result<MatchResult> {
    let (a, b) = (a.into(), b.into());
    check_layers(&a, &b)?;
    let (na, nb) = (a.n(), b.n());
    let n = na.max(nb);
    let s = match similarity {
        Some(s) => padded_similarity(s, na, nb, n)?,
        None if !seeds.is_empty() => seed_similarity(seeds, n),
        None => {
            return Err(Error::Precondition("IsoRank needs a similarity matrix or seeds".into()));
        }
    };
    let norm = l1(&s);
    if norm == 0.0 {
        return Err(Error::Precondition("similarity matrix is all zero".into()));
    }
    let e = s / norm;
    let an: Vec<Matrix> = a.padded(n).iter().map(|m| Matrix::Sparse(m.to_csr().column_normalized())).collect();
    let bn: Vec<Matrix> = b.padded(n).iter().map(|m| Matrix::Sparse(m.to_csr().column_normalized())).collect();
    let mut d = e.clone();
    let mut iter = 0;
    let mut converged = false;
    while iter < config.max_iter {
        iter += 1;
        let mut next = e.clone();
        for (la, lb) in an.iter().zip(&bn) {
            next += la.mul(&lb.left_mul_tr(&d));
        }
        let s = l1(&next);
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Numerical("IsoRank iterate lost its mass".into()));
        }
        next /= s;
        let change = l1(&(&next - &d));
        d = next;
        if change < config.tol {
            converged = true;
            break;
        }
    }
    let part = Partition::new(seeds, n);
    let mut details = Details::new();
    details.insert("method".into(), json!("isorank"));
    details.insert("iter".into(), json!(iter));
    details.insert("converged".into(), json!(converged));
    details.insert("extraction".into(), json!(config.extraction));
    details.insert("convention".into(), json!("D <- A D B^T + E, column-normalized A, B"));
    let found = match config.extraction {
        Extraction::Greedy => {
            let g = greedy(&d, &part.free_a, &part.free_b);
            details.insert("match_order".into(), json!(g.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>()));
            g
        }
        Extraction::Lap => {
            details.insert("lap_method".into(), json!(config.lap_method.to_string()));
            lap_extract(&d, &part, config.lap_method)?
        }
    };
    let mut corr = seeds.pairs().to_vec();
    corr.extend(found);
    make_match(corr, (na, nb), seeds, Some(d), details)
}

/// Symmetric and skew-symmetric parts `((A + Aᵀ)/2, (A − Aᵀ)/2)` of an adjacency matrix.
pub fn hermitian_embed(g: &Graph) -> (DMatrix<f64>, DMatrix<f64>) {
    hermitian_parts(&g.to_dense())
}

fn hermitian_parts(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let t = a.transpose();
    ((a + &t) * 0.5, (a - &t) * 0.5)
}

/// Real `2n × 2n` symmetric form `[[A_S, −A_N], [A_N, A_S]]` of the Hermitian `A_S + i·A_N`.
pub fn real_embedding(sym: &DMatrix<f64>, skew: &DMatrix<f64>) -> DMatrix<f64> {
    let n = sym.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(sym);
    m.view_mut((n, n), (n, n)).copy_from(sym);
    m.view_mut((0, n), (n, n)).copy_from(&(-skew));
    m.view_mut((n, 0), (n, n)).copy_from(skew);
    m
}

/// Eigen-decomposition with columns ordered by descending eigenvalue (stable on ties).
fn sorted_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigendecomposition of a non-finite matrix".into()));
    }
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    Ok((vals, eig.eigenvectors.select_columns(&idx)))
}

/// `|U|` for a layer: entrywise absolute eigenvectors, or for directed input the moduli of
/// the complex Hermitian eigenvectors read off the real embedding.
pub(crate) fn abs_eigenvectors(a: &DMatrix<f64>, directed: bool) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !directed {
        let (_, u) = sorted_eigen(a.clone())?;
        return Ok(u.abs());
    }
    let (sym, skew) = hermitian_parts(a);
    let (_, u) = sorted_eigen(real_embedding(&sym, &skew))?;
    // each Hermitian eigenvalue appears twice; take one eigenvector per pair
    Ok(DMatrix::from_fn(n, n, |i, k| {
        let (p, q) = (u[(i, 2 * k)], u[(i + n, 2 * k)]);
        p.hypot(q)
    }))
}

/// Umeyama: maximize `<P, Σ |U_A||U_B|ᵀ (+ S)>` over non-seed permutations.
pub fn gm_umeyama(
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    seeds: &SeedSet,
    similarity: Option<&DMatrix<f64>>,
    lap_method: LapMethod,
) -> Result<MatchResult> {
    let (a, b) = (a.into(), b.into());
    check_layers(&a, &b)?;
    let (na, nb) = (a.n(), b.n());
    let n = na.max(nb);
    let mut profit = DMatrix::zeros(n, n);
    let mut any_directed = false;
    for (la, lb) in a.padded(n).iter().zip(b.padded(n).iter()) {
        let (da, db) = (la.to_dense(), lb.to_dense());
        let directed = da != da.transpose() || db != db.transpose();
        any_directed |= directed;
        profit += abs_eigenvectors(&da, directed)? * abs_eigenvectors(&db, directed)?.transpose();
    }
    if let Some(s) = similarity {
        profit += padded_similarity(s, na, nb, n)?;
    }
    let part = Partition::new(seeds, n);
    let mut corr = seeds.pairs().to_vec();
    corr.extend(lap_extract(&profit, &part, lap_method)?);
    let mut details = Details::new();
    details.insert("method".into(), json!("umeyama"));
    details.insert("directed".into(), json!(any_directed));
    details.insert("lap_method".into(), json!(lap_method.to_string()));
    make_match(corr, (na, nb), seeds, Some(profit), details)
}
