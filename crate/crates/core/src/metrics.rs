//! Goodness-of-match measures.
//!
//! Graph level: edge summaries (common, missing and extra edges, common non-edges, Frobenius
//! residual), edge correctness and the largest common connected subgraph. Vertex level: row
//! difference and row correlation statistics, their permutation-standardized versions, and
//! rankings built on them.
//!
//! All comparisons happen in A's vertex frame: B is relabeled by the match (`P B Pᵀ`) and only
//! matched A vertices take part. An entry counts as an edge when its weight is positive.

use std::collections::BTreeMap;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::frame::MatchResult;
use crate::graph::{components, Layers};
use crate::matrix::CsrMatrix;
use crate::rng;
use crate::{Error, Result};

pub const DEFAULT_N_MC: usize = 200;

/// How pairs are counted in an edge summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Counting {
    /// Unordered pairs for undirected layers, ordered pairs for directed ones. The diagonal
    /// takes part only when a loop is present.
    #[default]
    Standard,
    /// Half the count over all ordered pairs, diagonal included, for every layer. Directed
    /// layers can then produce half-integer counts.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LayerSummary {
    pub common_edges: f64,
    pub missing_edges: f64,
    pub extra_edges: f64,
    pub common_non_edges: f64,
    pub fnorm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSummary {
    pub layers: Vec<LayerSummary>,
    /// Non-seed matched pairs.
    pub n_matches: usize,
    /// Correct non-seed pairs, when the truth is known.
    pub n_true_matches: Option<usize>,
    pub n_seeds: usize,
    pub nnodes: (usize, usize),
    pub objective: Option<f64>,
}

/// Graphs relabeled into A's frame, shared by all measures.
struct Frame {
    n: usize,
    a: Vec<CsrMatrix>,
    b: Vec<CsrMatrix>,
    directed: Vec<bool>,
    /// `fwd[a]`: B partner of A vertex `a`.
    fwd: Vec<Option<usize>>,
    /// `back[b]`: A partner of B vertex `b`, `usize::MAX` when unmatched.
    back: Vec<usize>,
}

impl Frame {
    fn new(m: &MatchResult, a: Layers, b: Layers) -> Result<Frame> {
        a.validate("A")?;
        b.validate("B")?;
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "A has {} layers but B has {}",
                a.len(),
                b.len()
            )));
        }
        let (na, nb) = m.nnodes();
        if a.n() != na || b.n() != nb {
            return Err(Error::Dimension(format!(
                "match is for graphs of order ({na}, {nb}) but got ({}, {})",
                a.n(),
                b.n()
            )));
        }
        let n = m.n();
        let csr = |l: &Layers| -> Vec<CsrMatrix> {
            l.iter().map(|x| x.to_csr().padded(n, n)).collect()
        };
        let directed = a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| !(x.is_symmetric(1e-12) && y.is_symmetric(1e-12)))
            .collect();
        let mut back = vec![usize::MAX; n];
        for &(i, j) in m.corr() {
            back[j] = i;
        }
        Ok(Frame {
            n,
            a: csr(&a),
            b: csr(&b),
            directed,
            fwd: m.forward_map(),
            back,
        })
    }

    fn matched(&self) -> Vec<bool> {
        self.fwd.iter().map(Option::is_some).collect()
    }

    /// Entries of A and of `P B Pᵀ` on matched vertices, keyed by position.
    fn aligned(&self, layer: usize) -> BTreeMap<(usize, usize), (f64, f64)> {
        let mask = self.matched();
        let mut out: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for (i, j, w) in self.a[layer].iter() {
            if mask[i] && mask[j] && w != 0.0 {
                out.entry((i, j)).or_default().0 = w;
            }
        }
        for (k, l, w) in self.b[layer].iter() {
            let (i, j) = (self.back[k], self.back[l]);
            if i != usize::MAX && j != usize::MAX && w != 0.0 {
                out.entry((i, j)).or_default().1 = w;
            }
        }
        out
    }

    fn layer_summary(&self, layer: usize, counting: Counting) -> LayerSummary {
        let entries = self.aligned(layer);
        let directed = self.directed[layer];
        let m = self.matched().iter().filter(|&&x| x).count() as f64;
        let loops = entries.keys().any(|&(i, j)| i == j);
        let (weight, total) = match counting {
            Counting::Literal => (0.5, 0.5 * m * m),
            Counting::Standard => {
                let off = if directed { m * (m - 1.0) } else { m * (m - 1.0) / 2.0 };
                (1.0, off + if loops { m } else { 0.0 })
            }
        };
        let mut s = LayerSummary::default();
        let mut fsq = 0.0;
        for (&(i, j), &(x, y)) in &entries {
            fsq += (x - y) * (x - y);
            if counting == Counting::Standard && !directed && i > j {
                continue;
            }
            match (x > 0.0, y > 0.0) {
                (true, true) => s.common_edges += weight,
                (true, false) => s.missing_edges += weight,
                (false, true) => s.extra_edges += weight,
                (false, false) => {}
            }
        }
        s.common_non_edges = total - s.common_edges - s.missing_edges - s.extra_edges;
        s.fnorm = fsq.sqrt();
        s
    }
}

fn check_truth(true_label: &[usize], n_a: usize) -> Result<()> {
    if true_label.len() != n_a {
        return Err(Error::Dimension(format!(
            "true label has {} entries but A has {n_a} vertices",
            true_label.len()
        )));
    }
    Ok(())
}

/// Edge summary of a match, one record per layer. `true_label[a]` is the true B partner of A
/// vertex `a`; an index at or beyond B's order means "no partner".
pub fn match_summary(
    m: &MatchResult,
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    true_label: Option<&[usize]>,
) -> Result<EdgeSummary> {
    match_summary_with(m, a, b, true_label, Counting::Standard)
}

pub fn match_summary_with(
    m: &MatchResult,
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    true_label: Option<&[usize]>,
    counting: Counting,
) -> Result<EdgeSummary> {
    let f = Frame::new(m, a.into(), b.into())?;
    let n_true_matches = match true_label {
        Some(t) => {
            check_truth(t, m.nnodes().0)?;
            let hits = m
                .corr()
                .iter()
                .zip(m.seeds_mask())
                .filter(|&(&(i, j), &s)| !s && t[i] == j)
                .count();
            Some(hits)
        }
        None => None,
    };
    let n_seeds = m.seeds_mask().iter().filter(|&&s| s).count();
    Ok(EdgeSummary {
        layers: (0..f.a.len()).map(|l| f.layer_summary(l, counting)).collect(),
        n_matches: m.len() - n_seeds,
        n_true_matches,
        n_seeds,
        nnodes: m.nnodes(),
        objective: m.detail("objective").and_then(|v| v.as_f64()),
    })
}

/// Fraction of A's edges (on matched vertices, all layers) that are common edges.
pub fn edge_correctness(summary: &EdgeSummary) -> Result<f64> {
    let ce: f64 = summary.layers.iter().map(|l| l.common_edges).sum();
    let e1: f64 = summary
        .layers
        .iter()
        .map(|l| l.common_edges + l.missing_edges)
        .sum();
    if e1 == 0.0 {
        return Err(Error::InvalidArgument("graph 1 has no edges".into()));
    }
    Ok(ce / e1)
}

/// Largest connected component of the common-edge graph on matched vertices (edges common in
/// any layer; direction ignored). Each matched vertex is a component of its own, so an
/// edgeless pair gives 1.
pub fn lccs_size(m: &MatchResult, a: impl Into<Layers>, b: impl Into<Layers>) -> Result<usize> {
    let f = Frame::new(m, a.into(), b.into())?;
    let mut common = Vec::new();
    for l in 0..f.a.len() {
        for (&(i, j), &(x, y)) in &f.aligned(l) {
            if x > 0.0 && y > 0.0 {
                common.push((i, j));
            }
        }
    }
    common.sort_unstable();
    common.dedup();
    let adj = CsrMatrix::from_triplets(f.n, f.n, common.into_iter().map(|(i, j)| (i, j, 1.0)))?;
    let labels = components(&adj);
    let mut sizes = vec![0usize; f.n];
    for (v, &l) in labels.iter().enumerate() {
        if f.fwd[v].is_some() {
            sizes[l] += 1;
        }
    }
    Ok(sizes.into_iter().max().unwrap_or(0))
}

/// Per-layer discrepancy codes in A's frame: 0 neither, 1 common, 2 only in A, 3 only in
/// `P B Pᵀ`. Rows and columns of unmatched A vertices are 0.
pub fn discrepancy(
    m: &MatchResult,
    a: impl Into<Layers>,
    b: impl Into<Layers>,
) -> Result<Vec<DMatrix<f64>>> {
    let f = Frame::new(m, a.into(), b.into())?;
    let (na, _) = m.nnodes();
    Ok((0..f.a.len())
        .map(|l| {
            let mut d = DMatrix::zeros(na, na);
            for (&(i, j), &(x, y)) in &f.aligned(l) {
                if i < na && j < na {
                    d[(i, j)] = match (x > 0.0, y > 0.0) {
                        (true, true) => 1.0,
                        (true, false) => 2.0,
                        (false, true) => 3.0,
                        (false, false) => 0.0,
                    };
                }
            }
            d
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStat {
    /// L1 distance between the rows of A and `P B Pᵀ`.
    Diff,
    /// One minus their Pearson correlation.
    Cor,
}

impl Frame {
    /// Raw statistic for A vertex `v` when it is paired with B vertex `bv` and the rest of B is
    /// relabeled through `back`. Rows of all layers are concatenated. `None` when the
    /// correlation is undefined.
    fn raw(&self, v: usize, bv: usize, back: &[usize], kind: RowStat) -> Option<f64> {
        let mut diff = 0.0;
        let (mut sa, mut saa, mut sr, mut srr, mut sar) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut r: Vec<(usize, f64)> = Vec::new();
        for l in 0..self.a.len() {
            let (ai, av) = self.a[l].row(v);
            r.clear();
            let (bi, bw) = self.b[l].row(bv);
            r.extend(
                bi.iter()
                    .zip(bw)
                    .filter(|e| back[*e.0] != usize::MAX && *e.1 != 0.0)
                    .map(|(&k, &w)| (back[k], w)),
            );
            r.sort_unstable_by_key(|e| e.0);
            // merge two sorted sparse rows
            let (mut p, mut q) = (0, 0);
            while p < ai.len() || q < r.len() {
                let (x, y) = match (ai.get(p), r.get(q)) {
                    (Some(&j), Some(&(k, w))) if j == k => {
                        p += 1;
                        q += 1;
                        (av[p - 1], w)
                    }
                    (Some(&j), Some(&(k, _))) if j < k => {
                        p += 1;
                        (av[p - 1], 0.0)
                    }
                    (Some(_), None) => {
                        p += 1;
                        (av[p - 1], 0.0)
                    }
                    (_, Some(&(_, w))) => {
                        q += 1;
                        (0.0, w)
                    }
                    (None, None) => unreachable!(),
                };
                diff += (x - y).abs();
                sa += x;
                saa += x * x;
                sr += y;
                srr += y * y;
                sar += x * y;
            }
        }
        match kind {
            RowStat::Diff => Some(diff),
            RowStat::Cor => {
                let len = (self.n * self.a.len()) as f64;
                let va = saa - sa * sa / len;
                let vr = srr - sr * sr / len;
                let flat = |v: f64, ss: f64| v <= 1e-12 * ss.max(1.0);
                if flat(va, saa) || flat(vr, srr) {
                    return None;
                }
                Some(1.0 - (sar - sa * sr / len) / (va * vr).sqrt())
            }
        }
    }

    fn partner(&self, v: usize) -> Result<usize> {
        self.fwd
            .get(v)
            .copied()
            .flatten()
            .ok_or_else(|| Error::InvalidArgument(format!("vertex {v} of A is not matched")))
    }

    fn observed(&self, v: usize, kind: RowStat) -> Result<Option<f64>> {
        let bv = self.partner(v)?;
        Ok(self.raw(v, bv, &self.back, kind))
    }

    fn perm_moments(&self, v: usize, kind: RowStat, n_mc: usize, seed: u64) -> Result<Option<PermMoments>> {
        if n_mc < 2 {
            return Err(Error::InvalidArgument("n_mc must be at least 2".into()));
        }
        let Some(observed) = self.observed(v, kind)? else {
            return Ok(None);
        };
        let mut r = rng::stream(seed, v as u64);
        let mut back = vec![0; self.n];
        let mut samples = Vec::with_capacity(n_mc);
        for _ in 0..n_mc {
            let pi = rng::permutation(self.n, &mut r);
            for (i, &j) in pi.iter().enumerate() {
                back[j] = i;
            }
            if let Some(t) = self.raw(v, pi[v], &back, kind) {
                samples.push(t);
            }
        }
        if samples.len() < 2 {
            return Ok(None);
        }
        let k = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / k;
        let variance = samples.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (k - 1.0);
        Ok(Some(PermMoments {
            observed,
            mean,
            variance,
            samples: samples.len(),
        }))
    }
}

/// Raw row statistic of A vertex `v` under the match. `None` when the correlation is undefined
/// because a row is constant.
pub fn row_stat(
    v: usize,
    m: &MatchResult,
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    kind: RowStat,
) -> Result<Option<f64>> {
    Frame::new(m, a.into(), b.into())?.observed(v, kind)
}

/// Observed statistic with Monte Carlo moments over uniform permutations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermMoments {
    pub observed: f64,
    pub mean: f64,
    /// Sample variance (divisor `samples - 1`).
    pub variance: f64,
    /// Permutations for which the statistic was defined.
    pub samples: usize,
}

impl PermMoments {
    /// Standardized statistic, `None` when the samples have no spread.
    pub fn standardized(&self) -> Option<f64> {
        let scale = self.mean.abs().max(1.0);
        (self.variance > 1e-24 * scale * scale).then(|| (self.observed - self.mean) / self.variance.sqrt())
    }
}

/// Moments of the row statistic of `v` under `n_mc` uniform permutations, drawn from stream
/// `v` of `rng_seed`.
pub fn row_perm_moments(
    v: usize,
    m: &MatchResult,
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    kind: RowStat,
    n_mc: usize,
    rng_seed: u64,
) -> Result<Option<PermMoments>> {
    Frame::new(m, a.into(), b.into())?.perm_moments(v, kind, n_mc, rng_seed)
}

/// Permutation-standardized row statistic; negative values mean fewer disagreements than a
/// random match would give.
pub fn row_perm_stat(
    v: usize,
    m: &MatchResult,
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    kind: RowStat,
    n_mc: usize,
    rng_seed: u64,
) -> Result<Option<f64>> {
    Ok(row_perm_moments(v, m, a, b, kind, n_mc, rng_seed)?.and_then(|p| p.standardized()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    RowDiff,
    RowCor,
    /// Standardized row difference.
    RowPermStat,
    /// Standardized row correlation.
    RowPermCor,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Measure> {
        match s {
            "row_diff" => Ok(Measure::RowDiff),
            "row_cor" => Ok(Measure::RowCor),
            "row_perm_stat" => Ok(Measure::RowPermStat),
            "row_perm_cor" => Ok(Measure::RowPermCor),
            _ => Err(Error::InvalidArgument(format!("unknown measure '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestMatchOptions {
    pub measure: Measure,
    /// Rows to return; all when `None`.
    pub num: Option<usize>,
    pub n_mc: usize,
    pub rng_seed: u64,
}

impl Default for BestMatchOptions {
    fn default() -> Self {
        BestMatchOptions {
            measure: Measure::RowPermStat,
            num: None,
            n_mc: DEFAULT_N_MC,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexStat {
    pub a_vertex: usize,
    pub b_vertex: usize,
    /// `None` when the measure is undefined; such rows rank last.
    pub measure_value: Option<f64>,
    /// Fraction of correct pairs among this row and those above it.
    pub precision: Option<f64>,
}

/// Non-seed matched pairs ranked by ascending measure (ties by A vertex, undefined last).
pub fn best_matches(
    m: &MatchResult,
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    opts: &BestMatchOptions,
    true_label: Option<&[usize]>,
) -> Result<Vec<VertexStat>> {
    let f = Frame::new(m, a.into(), b.into())?;
    if let Some(t) = true_label {
        check_truth(t, m.nnodes().0)?;
    }
    let mut rows = Vec::new();
    for (&(i, j), &seed) in m.corr().iter().zip(m.seeds_mask()) {
        if seed {
            continue;
        }
        let value = match opts.measure {
            Measure::RowDiff => f.observed(i, RowStat::Diff)?,
            Measure::RowCor => f.observed(i, RowStat::Cor)?,
            Measure::RowPermStat => f
                .perm_moments(i, RowStat::Diff, opts.n_mc, opts.rng_seed)?
                .and_then(|p| p.standardized()),
            Measure::RowPermCor => f
                .perm_moments(i, RowStat::Cor, opts.n_mc, opts.rng_seed)?
                .and_then(|p| p.standardized()),
        };
        rows.push(VertexStat {
            a_vertex: i,
            b_vertex: j,
            measure_value: value,
            precision: None,
        });
    }
    rows.sort_by(|x, y| match (x.measure_value, y.measure_value) {
        (Some(p), Some(q)) => p.total_cmp(&q).then(x.a_vertex.cmp(&y.a_vertex)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => x.a_vertex.cmp(&y.a_vertex),
    });
    if let Some(t) = true_label {
        let mut hits = 0usize;
        for (k, row) in rows.iter_mut().enumerate() {
            hits += (t[row.a_vertex] == row.b_vertex) as usize;
            row.precision = Some(hits as f64 / (k + 1) as f64);
        }
    }
    if let Some(num) = opts.num {
        rows.truncate(num);
    }
    Ok(rows)
}

/// Detection curves over a ranking whose core vertices are the A vertices below `n_core`.
/// Entry `r - 1` of the core curve is the fraction of core vertices among the first `r`
/// rows; entry `r - 1` of the junk curve is the fraction of junk vertices among the last `r`.
pub fn core_junk_precision(
    ranking: &[VertexStat],
    n_core: usize,
    n_junk: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if ranking.len() != n_core + n_junk {
        return Err(Error::Dimension(format!(
            "ranking has {} rows but n_core + n_junk = {}",
            ranking.len(),
            n_core + n_junk
        )));
    }
    let curve = |it: &mut dyn Iterator<Item = bool>| {
        let mut hits = 0usize;
        it.enumerate()
            .map(|(k, hit)| {
                hits += hit as usize;
                hits as f64 / (k + 1) as f64
            })
            .collect::<Vec<f64>>()
    };
    let core = curve(&mut ranking.iter().map(|r| r.a_vertex < n_core));
    let junk = curve(&mut ranking.iter().rev().map(|r| r.a_vertex >= n_core));
    Ok((core, junk))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftScores {
    pub k: usize,
    /// Fraction of evaluated vertices whose hard match is correct.
    pub precision: f64,
    /// Fraction of evaluated vertices whose true partner is among the `k` largest entries of
    /// their soft row.
    pub map_at_k: f64,
    /// Non-seed A vertices with a true partner in B.
    pub evaluated: usize,
}

/// Precision and MAP@k of a match carrying a soft matrix. Ties in a soft row go to the smaller
/// B index.
pub fn map_at_k(m: &MatchResult, true_label: &[usize], k: usize) -> Result<SoftScores> {
    let soft = m
        .soft
        .as_ref()
        .ok_or_else(|| Error::Precondition("the match has no soft matrix".into()))?;
    let (na, nb) = m.nnodes();
    check_truth(true_label, na)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let seeds = m.seeds();
    let fwd = m.forward_map();
    let (mut hard, mut top, mut count) = (0usize, 0usize, 0usize);
    for (i, &t) in true_label.iter().enumerate() {
        if t >= nb || seeds.pairs().iter().any(|s| s.0 == i) {
            continue;
        }
        count += 1;
        hard += (fwd[i] == Some(t)) as usize;
        let mut cols: Vec<usize> = (0..nb).collect();
        cols.sort_by(|&x, &y| soft[(i, y)].total_cmp(&soft[(i, x)]).then(x.cmp(&y)));
        top += cols[..k.min(nb)].contains(&t) as usize;
    }
    if count == 0 {
        return Err(Error::InvalidArgument("no non-seed vertex has a true partner".into()));
    }
    Ok(SoftScores {
        k,
        precision: hard as f64 / count as f64,
        map_at_k: top as f64 / count as f64,
        evaluated: count,
    })
}
