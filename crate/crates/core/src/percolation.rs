//! Percolation matching and ExpandWhenStuck.
//!
//! Marks only ever grow, so the next match comes from a max-heap with lazy deletion: stale
//! entries (mark changed, or row/column already matched) are skipped when popped.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use nalgebra::DMatrix;
use serde_json::json;

use crate::error::{Error, Result};
use crate::frame::{make_match, Details, MatchResult, SeedSet};
use crate::graph::Layers;
use crate::matrix::CsrMatrix;

pub const DEFAULT_R: f64 = 2.0;

/// Score a neighboring pair contributes, from the two edge weights involved.
/// `None` when both weights are zero.
pub fn weighted_mark_increment(w1: f64, w2: f64) -> Option<f64> {
    let m = w1.abs().max(w2.abs());
    if m == 0.0 {
        return None;
    }
    Some((1.0 - (w1 - w2).abs() / m).max(0.0))
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        // largest mark first, then smallest a, then smallest b
        self.0
            .total_cmp(&o.0)
            .then_with(|| o.1.cmp(&self.1))
            .then_with(|| o.2.cmp(&self.2))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

struct LayerPair {
    a: CsrMatrix,
    b: CsrMatrix,
    /// Transposes, present for directed layers.
    at: Option<CsrMatrix>,
    bt: Option<CsrMatrix>,
}

struct State {
    layers: Vec<LayerPair>,
    marks: HashMap<(usize, usize), f64>,
    heap: BinaryHeap<Entry>,
    used_a: Vec<bool>,
    used_b: Vec<bool>,
    r: f64,
}

impl State {
    fn new(a: &Layers, b: &Layers, r: f64) -> Result<Self> {
        a.validate("A")?;
        b.validate("B")?;
        if a.len() != b.len() {
            return Err(Error::Dimension(format!(
                "A has {} layers but B has {}",
                a.len(),
                b.len()
            )));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidArgument(format!("threshold r must be positive, got {r}")));
        }
        let layers = a
            .iter()
            .zip(b.iter())
            .map(|(la, lb)| {
                let (a, b) = (la.to_csr(), lb.to_csr());
                let directed = !(a.is_symmetric() && b.is_symmetric());
                LayerPair {
                    at: directed.then(|| a.transpose()),
                    bt: directed.then(|| b.transpose()),
                    a,
                    b,
                }
            })
            .collect();
        Ok(State {
            layers,
            marks: HashMap::new(),
            heap: BinaryHeap::new(),
            used_a: vec![false; a.n()],
            used_b: vec![false; b.n()],
            r,
        })
    }

    fn add(&mut self, i: usize, j: usize, inc: f64) {
        let m = self.marks.entry((i, j)).or_insert(0.0);
        *m += inc;
        if *m >= self.r {
            self.heap.push(Entry(*m, i, j));
        }
    }

    /// Adds the contributions of pair `(u, v)` to all of its unmatched neighboring pairs.
    fn spread(&mut self, u: usize, v: usize) {
        let mut incs = Vec::new();
        for l in &self.layers {
            let mut collect = |a: &CsrMatrix, b: &CsrMatrix| {
                let (ai, aw) = a.row(u);
                let (bj, bw) = b.row(v);
                for (&i, &wi) in ai.iter().zip(aw) {
                    if self.used_a[i] {
                        continue;
                    }
                    for (&j, &wj) in bj.iter().zip(bw) {
                        if self.used_b[j] {
                            continue;
                        }
                        if let Some(x) = weighted_mark_increment(wi, wj) {
                            incs.push((i, j, x));
                        }
                    }
                }
            };
            collect(&l.a, &l.b);
            if let (Some(at), Some(bt)) = (&l.at, &l.bt) {
                collect(at, bt);
            }
        }
        for (i, j, x) in incs {
            self.add(i, j, x);
        }
    }

    fn mark(&self, i: usize, j: usize) -> f64 {
        self.marks.get(&(i, j)).copied().unwrap_or(0.0)
    }

    fn claim(&mut self, a: usize, b: usize) {
        self.used_a[a] = true;
        self.used_b[b] = true;
    }

    /// Matches while some unmatched pair has mark ≥ r; returns `(a, b, mark)` in order.
    fn percolate(&mut self) -> Vec<(usize, usize, f64)> {
        let mut order = Vec::new();
        while let Some(Entry(m, a, b)) = self.heap.pop() {
            if self.used_a[a] || self.used_b[b] || m != self.mark(a, b) {
                continue;
            }
            self.claim(a, b);
            order.push((a, b, m));
            self.spread(a, b);
        }
        order
    }
}

fn check_prior(seeds: &SeedSet, similarity: Option<&DMatrix<f64>>, na: usize, nb: usize) -> Result<()> {
    if let Some(s) = similarity {
        if s.nrows() != na || s.ncols() != nb {
            return Err(Error::Dimension(format!(
                "similarity is {}x{}, expected {na}x{nb}",
                s.nrows(),
                s.ncols()
            )));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("similarity has non-finite entries".into()));
        }
    }
    let has_sim = similarity.is_some_and(|s| s.iter().any(|&v| v != 0.0));
    if seeds.is_empty() && !has_sim {
        return Err(Error::Precondition(
            "percolation needs at least one seed or a nonzero similarity".into(),
        ));
    }
    Ok(())
}

fn start(
    a: &Layers,
    b: &Layers,
    seeds: &SeedSet,
    similarity: Option<&DMatrix<f64>>,
    r: f64,
) -> Result<State> {
    let mut st = State::new(a, b, r)?;
    check_prior(seeds, similarity, a.n(), b.n())?;
    for &(sa, sb) in seeds.pairs() {
        if sa >= a.n() || sb >= b.n() {
            return Err(Error::VertexOutOfRange { vertex: sa.max(sb), n: a.n().min(b.n()) });
        }
        st.claim(sa, sb);
    }
    if let Some(s) = similarity {
        for i in 0..s.nrows() {
            for j in 0..s.ncols() {
                if s[(i, j)] != 0.0 && !st.used_a[i] && !st.used_b[j] {
                    st.add(i, j, s[(i, j)]);
                }
            }
        }
    }
    for &(sa, sb) in seeds.pairs() {
        st.spread(sa, sb);
    }
    Ok(st)
}

fn result(
    a: &Layers,
    b: &Layers,
    seeds: &SeedSet,
    order: &[(usize, usize, f64)],
    mut details: Details,
) -> Result<MatchResult> {
    let mut corr = seeds.pairs().to_vec();
    corr.extend(order.iter().map(|&(x, y, _)| (x, y)));
    details.insert("match_order".into(), json!(order.iter().map(|&(x, y, m)| json!([x, y, m])).collect::<Vec<_>>()));
    make_match(corr, (a.n(), b.n()), seeds, None, details)
}

/// Percolation graph matching. Returns a possibly partial correspondence;
/// `details.match_order` lists `[a, b, mark]` in the order pairs were matched.
pub fn gm_percolation(
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    seeds: &SeedSet,
    similarity: Option<&DMatrix<f64>>,
    r: f64,
) -> Result<MatchResult> {
    let (a, b) = (a.into(), b.into());
    let mut st = start(&a, &b, seeds, similarity, r)?;
    let order = st.percolate();
    let mut details = Details::new();
    details.insert("method".into(), json!("percolation"));
    details.insert("r".into(), json!(r));
    result(&a, &b, seeds, &order, details)
}

/// Percolation that, whenever it stops short, promotes every unmatched pair with mark ≥ 1 to a
/// temporary seed (spreading its marks once, never matching it) and resumes.
/// `details.rounds` holds the `match_order` length at each expansion.
pub fn gm_expand_when_stuck(
    a: impl Into<Layers>,
    b: impl Into<Layers>,
    seeds: &SeedSet,
    similarity: Option<&DMatrix<f64>>,
    r: f64,
) -> Result<MatchResult> {
    let (a, b) = (a.into(), b.into());
    let mut st = start(&a, &b, seeds, similarity, r)?;
    let full = a.n().min(b.n());
    let mut order = st.percolate();
    let mut used_as_temp: HashSet<(usize, usize)> = HashSet::new();
    let mut rounds = Vec::new();
    while seeds.len() + order.len() < full {
        let mut temp: Vec<(usize, usize)> = st
            .marks
            .iter()
            .filter(|(&(i, j), &m)| {
                m >= 1.0 && !st.used_a[i] && !st.used_b[j] && !used_as_temp.contains(&(i, j))
            })
            .map(|(&p, _)| p)
            .collect();
        if temp.is_empty() {
            break;
        }
        temp.sort_unstable();
        rounds.push(order.len());
        for &(i, j) in &temp {
            used_as_temp.insert((i, j));
            st.spread(i, j);
        }
        order.extend(st.percolate());
    }
    let mut details = Details::new();
    details.insert("method".into(), json!("expand_when_stuck"));
    details.insert("r".into(), json!(r));
    details.insert("rounds".into(), json!(rounds));
    result(&a, &b, seeds, &order, details)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn star() -> Graph {
        Graph::from_pairs(4, &[(0, 1), (0, 2), (0, 3)], false).unwrap()
    }

    #[test]
    fn increment_formula() {
        assert_eq!(weighted_mark_increment(2.0, 2.0), Some(1.0));
        assert!((weighted_mark_increment(1.0, 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(weighted_mark_increment(0.0, 5.0), Some(0.0));
        assert_eq!(weighted_mark_increment(0.0, 0.0), None);
    }

    #[test]
    fn star_needs_low_threshold() {
        let g = star();
        let seeds = SeedSet::new(vec![(0, 0)], 4, 4).unwrap();
        let m = gm_percolation(&g, &g, &seeds, None, 2.0).unwrap();
        assert_eq!(m.corr(), &[(0, 0)]);
        let m = gm_percolation(&g, &g, &seeds, None, 1.0).unwrap();
        assert_eq!(m.corr(), &[(0, 0), (1, 1), (2, 2), (3, 3)]);
        assert_eq!(m.details["match_order"], json!([[1, 1, 1.0], [2, 2, 1.0], [3, 3, 1.0]]));
    }

    #[test]
    fn expansion_unsticks_a_four_cycle() {
        let g = Graph::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], false).unwrap();
        let seeds = SeedSet::new(vec![(0, 0)], 4, 4).unwrap();
        let plain = gm_percolation(&g, &g, &seeds, None, 2.0).unwrap();
        assert_eq!(plain.corr(), &[(0, 0)]);
        let m = gm_expand_when_stuck(&g, &g, &seeds, None, 2.0).unwrap();
        assert_eq!(m.details["match_order"], json!([[3, 3, 4.0], [1, 1, 2.0], [2, 2, 2.0]]));
        assert_eq!(m.details["rounds"], json!([0]));
    }

    #[test]
    fn star_expansion_gains_nothing() {
        // every leaf pair's only neighboring pair is the seed itself
        let g = star();
        let seeds = SeedSet::new(vec![(0, 0)], 4, 4).unwrap();
        let m = gm_expand_when_stuck(&g, &g, &seeds, None, 2.0).unwrap();
        assert_eq!(m.corr(), &[(0, 0)]);
    }

    #[test]
    fn similarity_forces_first_match() {
        let g = Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], false).unwrap();
        let mut s = DMatrix::zeros(4, 4);
        s[(2, 2)] = 100.0;
        let m = gm_percolation(&g, &g, &SeedSet::empty(), Some(&s), 1.0).unwrap();
        assert_eq!(m.details["match_order"][0], json!([2, 2, 100.0]));
    }

    #[test]
    fn needs_a_prior() {
        let g = star();
        let err = gm_percolation(&g, &g, &SeedSet::empty(), None, 2.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        let err = gm_percolation(&g, &g, &SeedSet::empty(), Some(&DMatrix::zeros(4, 4)), 2.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn empty_graphs_keep_the_seed() {
        let g = Graph::empty(3, false);
        let seeds = SeedSet::new(vec![(1, 2)], 3, 3).unwrap();
        let m = gm_expand_when_stuck(&g, &g, &seeds, None, 2.0).unwrap();
        assert_eq!(m.corr(), &[(1, 2)]);
    }

    #[test]
    fn directed_counts_both_directions() {
        // 0 -> 1 and 2 -> 0: seed (0, 0) gives pair (1, 1) an out-out mark and (2, 2) an in-in mark
        let g = Graph::from_pairs(3, &[(0, 1), (2, 0)], true).unwrap();
        let seeds = SeedSet::new(vec![(0, 0)], 3, 3).unwrap();
        let m = gm_percolation(&g, &g, &seeds, None, 1.0).unwrap();
        assert_eq!(m.corr(), &[(0, 0), (1, 1), (2, 2)]);
    }
}
