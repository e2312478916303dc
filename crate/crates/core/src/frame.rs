//! Shared matching substrate: seeds, start matrices, match results and permutations.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::CsrMatrix;
use crate::rng;

/// Known-correct vertex pairs `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SeedSet {
    pairs: Vec<(usize, usize)>,
}

impl SeedSet {
    /// Validates distinctness on both sides and bounds.
    pub fn new(pairs: Vec<(usize, usize)>, n_a: usize, n_b: usize) -> Result<Self> {
        let mut used_a = vec![false; n_a];
        let mut used_b = vec![false; n_b];
        for &(a, b) in &pairs {
            if a >= n_a {
                return Err(Error::VertexOutOfRange { vertex: a, n: n_a });
            }
            if b >= n_b {
                return Err(Error::VertexOutOfRange { vertex: b, n: n_b });
            }
            if std::mem::replace(&mut used_a[a], true) {
                return Err(Error::DuplicateSeed { side: 'A', index: a });
            }
            if std::mem::replace(&mut used_b[b], true) {
                return Err(Error::DuplicateSeed { side: 'B', index: b });
            }
        }
        Ok(SeedSet { pairs })
    }

    pub fn empty() -> Self {
        SeedSet::default()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.contains(&pair)
    }
}

/// The accepted ways of naming seeds.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    /// Vertex `i` in A is vertex `i` in B.
    Indices(Vec<usize>),
    /// `flags[i]` marks vertex `i` as seeded to itself.
    Flags(Vec<bool>),
    Pairs(Vec<(usize, usize)>),
}

pub fn resolve_seeds(spec: &SeedSpec, n_a: usize, n_b: usize) -> Result<SeedSet> {
    let pairs = match spec {
        SeedSpec::Indices(v) => v.iter().map(|&i| (i, i)).collect(),
        SeedSpec::Flags(f) => f
            .iter()
            .enumerate()
            .filter(|e| *e.1)
            .map(|(i, _)| (i, i))
            .collect(),
        SeedSpec::Pairs(p) => p.clone(),
    };
    SeedSet::new(pairs, n_a, n_b)
}

/// Seeds and non-seeds of a padded `n`-vertex problem, in the order the solvers use.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Partition {
    pub seeds_a: Vec<usize>,
    pub seeds_b: Vec<usize>,
    pub free_a: Vec<usize>,
    pub free_b: Vec<usize>,
}

impl Partition {
    pub fn new(seeds: &SeedSet, n: usize) -> Self {
        let seeds_a: Vec<usize> = seeds.pairs().iter().map(|p| p.0).collect();
        let seeds_b: Vec<usize> = seeds.pairs().iter().map(|p| p.1).collect();
        let rest = |taken: &[usize]| {
            let mut mark = vec![false; n];
            for &t in taken {
                mark[t] = true;
            }
            (0..n).filter(|&v| !mark[v]).collect::<Vec<_>>()
        };
        Partition {
            free_a: rest(&seeds_a),
            free_b: rest(&seeds_b),
            seeds_a,
            seeds_b,
        }
    }

    pub fn n_free(&self) -> usize {
        self.free_a.len()
    }
}

/// Square nonnegative matrix with unit row and column sums (to `1e-8`).
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochastic(DMatrix<f64>);

pub const DS_TOL: f64 = 1e-8;

impl DoublyStochastic {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let dev = ds_deviation(&m);
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension(format!(
                "doubly stochastic matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if dev > DS_TOL || m.iter().any(|&v| v < -1e-12 || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not doubly stochastic (max margin deviation {dev:.3e})"
            )));
        }
        Ok(DoublyStochastic(m))
    }

    pub fn barycenter(n: usize) -> Self {
        DoublyStochastic(DMatrix::from_element(n, n, 1.0 / n.max(1) as f64))
    }

    pub fn identity(n: usize) -> Self {
        DoublyStochastic(DMatrix::identity(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

/// Largest absolute deviation of a row or column sum from one.
pub fn ds_deviation(m: &DMatrix<f64>) -> f64 {
    let rows = m.row_iter().map(|r| (r.sum() - 1.0).abs());
    let cols = m.column_iter().map(|c| (c.sum() - 1.0).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

/// Alternating row/column scaling until every margin is within `tol` of one.
pub fn sinkhorn(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<DMatrix<f64>> {
    let mut x = m.clone();
    if x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "sinkhorn needs a finite nonnegative matrix".into(),
        ));
    }
    for _ in 0..max_iter {
        if ds_deviation(&x) < tol {
            return Ok(x);
        }
        for mut r in x.row_iter_mut() {
            let s = r.sum();
            if s > 0.0 {
                r /= s;
            }
        }
        for mut c in x.column_iter_mut() {
            let s = c.sum();
            if s > 0.0 {
                c /= s;
            }
        }
    }
    if ds_deviation(&x) < tol {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "sinkhorn did not reach {tol:e} in {max_iter} sweeps"
        )))
    }
}

/// How the non-seed start block is filled.
#[derive(Debug, Clone, PartialEq)]
pub enum StartKind {
    /// Barycenter, all entries equal.
    Bari,
    /// Random doubly stochastic: mean of ten uniform permutation matrices, Sinkhorn balanced.
    Rds,
    /// A given nonnegative matrix, Sinkhorn balanced.
    Matrix(DMatrix<f64>),
}

/// Builds a start matrix over the `nns` non-seed vertices.
///
/// Soft seeds use full vertex indices, with the first `ns` vertices assumed to be the hard
/// seeds; each soft pair `(a, b)` fixes row `a - ns` to the unit vector at column `b - ns`.
pub fn init_start(
    kind: &StartKind,
    nns: usize,
    ns: usize,
    soft_seeds: &SeedSet,
    rng_seed: u64,
) -> Result<DoublyStochastic> {
    let mut rows = vec![false; nns];
    let mut cols = vec![false; nns];
    let mut fixed = Vec::new();
    for &(a, b) in soft_seeds.pairs() {
        let (Some(r), Some(c)) = (a.checked_sub(ns), b.checked_sub(ns)) else {
            return Err(Error::InvalidArgument(format!(
                "soft seed ({a}, {b}) falls among the {ns} hard seeds"
            )));
        };
        if r >= nns || c >= nns {
            return Err(Error::VertexOutOfRange {
                vertex: r.max(c) + ns,
                n: nns + ns,
            });
        }
        if std::mem::replace(&mut rows[r], true) || std::mem::replace(&mut cols[c], true) {
            return Err(Error::InvalidArgument(format!(
                "conflicting soft seed ({a}, {b})"
            )));
        }
        fixed.push((r, c));
    }
    let free_r: Vec<usize> = (0..nns).filter(|&i| !rows[i]).collect();
    let free_c: Vec<usize> = (0..nns).filter(|&j| !cols[j]).collect();
    let k = free_r.len();
    let block = match kind {
        StartKind::Bari => DMatrix::from_element(k, k, 1.0 / k.max(1) as f64),
        StartKind::Rds => {
            let mut r = rng::rng(rng_seed);
            let mut acc = DMatrix::zeros(k, k);
            for _ in 0..10 {
                for (i, j) in rng::permutation(k, &mut r).into_iter().enumerate() {
                    acc[(i, j)] += 0.1;
                }
            }
            sinkhorn(&acc, DS_TOL * 1e-2, 10_000)?
        }
        StartKind::Matrix(m) => {
            if m.nrows() != nns || m.ncols() != nns {
                return Err(Error::Dimension(format!(
                    "start matrix is {}x{}, expected {nns}x{nns}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let sub = m.select_rows(&free_r).select_columns(&free_c);
            sinkhorn(&sub, DS_TOL * 1e-2, 100_000)?
        }
    };
    let mut out = DMatrix::zeros(nns, nns);
    for (r, c) in fixed {
        out[(r, c)] = 1.0;
    }
    for (bi, &i) in free_r.iter().enumerate() {
        for (bj, &j) in free_c.iter().enumerate() {
            out[(i, j)] = block[(bi, bj)];
        }
    }
    DoublyStochastic::new(out)
}

/// Method-specific details attached to a match (iterations, LAP method, match order, ...).
pub type Details = BTreeMap<String, Value>;

/// A vertex correspondence between graphs A and B.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    corr: Vec<(usize, usize)>,
    nnodes: (usize, usize),
    seeds_mask: Vec<bool>,
    /// Soft assignment scores over the padded vertex sets (rows A, columns B).
    pub soft: Option<DMatrix<f64>>,
    pub details: Details,
}

/// Validates and assembles a [`MatchResult`]. Built-in and user-supplied methods both end here.
///
/// Pairs that involve a padding vertex (index `>= n_a` on the A side or `>= n_b` on the B
/// side) are dropped. Every remaining index must be distinct per side, and every seed pair
/// must be present.
pub fn make_match(
    corr: Vec<(usize, usize)>,
    nnodes: (usize, usize),
    seeds: &SeedSet,
    soft: Option<DMatrix<f64>>,
    details: Details,
) -> Result<MatchResult> {
    let (n_a, n_b) = nnodes;
    let n = n_a.max(n_b);
    let mut corr: Vec<(usize, usize)> = corr
        .into_iter()
        .filter(|&(a, b)| !(a >= n_a && a < n || b >= n_b && b < n))
        .collect();
    let mut used_a = vec![false; n_a];
    let mut used_b = vec![false; n_b];
    for &(a, b) in &corr {
        if a >= n_a {
            return Err(Error::VertexOutOfRange { vertex: a, n: n_a });
        }
        if b >= n_b {
            return Err(Error::VertexOutOfRange { vertex: b, n: n_b });
        }
        if std::mem::replace(&mut used_a[a], true) {
            return Err(Error::NotInjective { side: 'A', index: a });
        }
        if std::mem::replace(&mut used_b[b], true) {
            return Err(Error::NotInjective { side: 'B', index: b });
        }
    }
    for &(a, b) in seeds.pairs() {
        if !corr.contains(&(a, b)) {
            return Err(Error::SeedMissing(a, b));
        }
    }
    corr.sort_unstable();
    let seeds_mask = corr.iter().map(|&p| seeds.contains(p)).collect();
    Ok(MatchResult {
        corr,
        nnodes,
        seeds_mask,
        soft,
        details,
    })
}

impl MatchResult {
    pub fn corr(&self) -> &[(usize, usize)] {
        &self.corr
    }

    pub fn nnodes(&self) -> (usize, usize) {
        self.nnodes
    }

    pub fn seeds_mask(&self) -> &[bool] {
        &self.seeds_mask
    }

    /// Padded order `max(n_a, n_b)`.
    pub fn n(&self) -> usize {
        self.nnodes.0.max(self.nnodes.1)
    }

    pub fn len(&self) -> usize {
        self.corr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corr.is_empty()
    }

    pub fn seeds(&self) -> SeedSet {
        SeedSet {
            pairs: self
                .corr
                .iter()
                .zip(&self.seeds_mask)
                .filter(|e| *e.1)
                .map(|e| *e.0)
                .collect(),
        }
    }

    /// `map[a] = Some(b)` for every matched A vertex, over the padded order.
    pub fn forward_map(&self) -> Vec<Option<usize>> {
        let mut m = vec![None; self.n()];
        for &(a, b) in &self.corr {
            m[a] = Some(b);
        }
        m
    }

    /// The same correspondence seen from B.
    pub fn inverse(&self) -> MatchResult {
        let mut pairs: Vec<((usize, usize), bool)> = self
            .corr
            .iter()
            .zip(&self.seeds_mask)
            .map(|(&(a, b), &s)| ((b, a), s))
            .collect();
        pairs.sort_unstable();
        MatchResult {
            corr: pairs.iter().map(|p| p.0).collect(),
            nnodes: (self.nnodes.1, self.nnodes.0),
            seeds_mask: pairs.iter().map(|p| p.1).collect(),
            soft: self.soft.as_ref().map(|s| s.transpose()),
            details: self.details.clone(),
        }
    }

    pub fn detail(&self, key: &str) -> Option<&Value> {
        self.details.get(key)
    }
}

/// 0/1 matrix with `P[a, b] = 1` per matched pair, of padded order `max(n_a, n_b)`.
pub fn perm_matrix(m: &MatchResult) -> CsrMatrix {
    let n = m.n();
    CsrMatrix::from_triplets(n, n, m.corr.iter().map(|&(a, b)| (a, b, 1.0)))
        .expect("validated correspondence")
}

/// `P B Pᵀ` for a sparse matrix: B's entries relabeled into A's vertex frame. Entries touching
/// an unmatched B vertex disappear.
pub fn permute_matrix(m: &MatchResult, b: &CsrMatrix) -> CsrMatrix {
    let n = m.n().max(b.nrows());
    let mut back = vec![usize::MAX; n];
    for &(a, bv) in &m.corr {
        back[bv] = a;
    }
    let trips = b.iter().filter_map(|(j, l, w)| {
        let (i, k) = (back[j], back[l]);
        (i != usize::MAX && k != usize::MAX).then_some((i, k, w))
    });
    CsrMatrix::from_triplets(n, n, trips).expect("indices within padded order")
}

/// `P B Pᵀ` as a graph (padded to the match order when needed).
pub fn permute_graph(m: &MatchResult, g: &Graph) -> Graph {
    let adj = permute_matrix(m, g.adjacency());
    Graph::from_adjacency(adj, g.is_directed()).expect("permutation preserves symmetry")
}

/// Non-seed rows of the correspondence.
pub fn nonseed_matches(m: &MatchResult) -> Vec<(usize, usize)> {
    m.corr
        .iter()
        .zip(&m.seeds_mask)
        .filter(|e| !*e.1)
        .map(|e| *e.0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_seed_forms() {
        let flags = SeedSpec::Flags(vec![true, true, false, false, false]);
        assert_eq!(resolve_seeds(&flags, 5, 5).unwrap().pairs(), &[(0, 0), (1, 1)]);
        assert!(resolve_seeds(&SeedSpec::Indices(vec![]), 5, 5).unwrap().is_empty());
        assert_eq!(
            resolve_seeds(&SeedSpec::Pairs(vec![(2, 3)]), 3, 4).unwrap().pairs(),
            &[(2, 3)]
        );
        assert!(resolve_seeds(&SeedSpec::Pairs(vec![(2, 3)]), 3, 3).is_err());
        assert!(matches!(
            resolve_seeds(&SeedSpec::Pairs(vec![(0, 1), (0, 2)]), 3, 3),
            Err(Error::DuplicateSeed { side: 'A', index: 0 })
        ));
        assert!(matches!(
            resolve_seeds(&SeedSpec::Pairs(vec![(0, 1), (2, 1)]), 3, 3),
            Err(Error::DuplicateSeed { side: 'B', index: 1 })
        ));
    }

    #[test]
    fn barycenter_start_with_soft_seed() {
        // hard seeds are vertices 0 and 1; soft seed (2, 3) in zero-based full indices
        let soft = SeedSet::new(vec![(2, 3)], 5, 5).unwrap();
        let s = init_start(&StartKind::Bari, 3, 2, &soft, 0).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.5, 0.0, 0.5, 0.5, 0.0, 0.5]);
        assert_eq!(s.as_matrix(), &expected);
        let plain = init_start(&StartKind::Bari, 2, 0, &SeedSet::empty(), 0).unwrap();
        assert_eq!(plain.as_matrix(), &DMatrix::from_element(2, 2, 0.5));
    }

    #[test]
    fn random_start_is_doubly_stochastic_and_seeded() {
        let soft = SeedSet::new(vec![(3, 5)], 8, 8).unwrap();
        let a = init_start(&StartKind::Rds, 6, 2, &soft, 9).unwrap();
        let b = init_start(&StartKind::Rds, 6, 2, &soft, 9).unwrap();
        assert_eq!(a, b);
        assert!(ds_deviation(a.as_matrix()) < 1e-8);
        assert_eq!(a.as_matrix()[(1, 3)], 1.0);
        assert!(a.as_matrix().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn conflicting_soft_seeds_error() {
        let soft = SeedSet { pairs: vec![(2, 3), (4, 3)] };
        assert!(init_start(&StartKind::Bari, 3, 2, &soft, 0).is_err());
        let inside_hard = SeedSet::new(vec![(1, 3)], 5, 5).unwrap();
        assert!(init_start(&StartKind::Bari, 3, 2, &inside_hard, 0).is_err());
    }

    #[test]
    fn make_match_masks_and_validates() {
        let seeds = SeedSet::new(vec![(0, 0), (1, 1)], 5, 5).unwrap();
        let m = make_match((0..5).map(|i| (i, i)).collect(), (5, 5), &seeds, None, Details::new()).unwrap();
        assert_eq!(m.seeds_mask(), &[true, true, false, false, false]);
        let dup = make_match(vec![(0, 0), (1, 0)], (5, 5), &SeedSet::empty(), None, Details::new());
        assert!(matches!(dup, Err(Error::NotInjective { side: 'B', index: 0 })));
        let missing = make_match(vec![(0, 0)], (5, 5), &seeds, None, Details::new());
        assert!(matches!(missing, Err(Error::SeedMissing(1, 1))));
    }

    #[test]
    fn padded_pairs_are_dropped() {
        let m = make_match(vec![(0, 1), (1, 2), (2, 0)], (2, 3), &SeedSet::empty(), None, Details::new()).unwrap();
        assert_eq!(m.corr(), &[(0, 1), (1, 2)]);
        assert_eq!(perm_matrix(&m).nrows(), 3);
    }

    #[test]
    fn perm_matrix_and_nonseeds() {
        let seeds = SeedSet::new(vec![(0, 0), (1, 1)], 5, 5).unwrap();
        let m = make_match(vec![(0, 0), (1, 1), (2, 4), (3, 3), (4, 2)], (5, 5), &seeds, None, Details::new()).unwrap();
        let p = perm_matrix(&m).to_dense();
        let mut expected = DMatrix::zeros(5, 5);
        for (a, b) in [(0, 0), (1, 1), (2, 4), (3, 3), (4, 2)] {
            expected[(a, b)] = 1.0;
        }
        assert_eq!(p, expected);
        assert_eq!(nonseed_matches(&m), vec![(2, 4), (3, 3), (4, 2)]);
        let all_seeds = make_match(vec![(0, 0), (1, 1)], (2, 2), &SeedSet::new(vec![(0, 0), (1, 1)], 2, 2).unwrap(), None, Details::new()).unwrap();
        assert!(nonseed_matches(&all_seeds).is_empty());
    }

    #[test]
    fn permute_graph_is_p_b_pt() {
        let b = Graph::from_pairs(5, &[(0, 1), (1, 2), (1, 4), (2, 4), (0, 4)], false).unwrap();
        let m = make_match(vec![(0, 0), (1, 1), (2, 4), (3, 3), (4, 2)], (5, 5), &SeedSet::empty(), None, Details::new()).unwrap();
        let p = perm_matrix(&m).to_dense();
        let expected = &p * b.to_dense() * p.transpose();
        assert_eq!(permute_graph(&m, &b).to_dense(), expected);
        let back = permute_graph(&m.inverse(), &permute_graph(&m, &b));
        assert_eq!(back, b);
    }

    #[test]
    fn partial_match_leaves_zero_rows() {
        let m = make_match(vec![(0, 0), (2, 1)], (3, 3), &SeedSet::empty(), None, Details::new()).unwrap();
        let p = perm_matrix(&m).to_dense();
        assert_eq!(p.row(1).sum(), 0.0);
        assert_eq!(p.sum(), 2.0);
    }

    #[test]
    fn sinkhorn_balances() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let s = sinkhorn(&m, 1e-12, 10_000).unwrap();
        assert!(ds_deviation(&s) < 1e-12);
        assert!(sinkhorn(&DMatrix::from_element(1, 1, -1.0), 1e-9, 10).is_err());
    }
}
