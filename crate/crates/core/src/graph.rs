//! Graphs, multilayer graphs, padding, centering, layer splitting and components.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::{CsrMatrix, Matrix, SplrMatrix};

/// A graph on vertices `0..n` stored as a sparse adjacency matrix.
///
/// Undirected graphs keep both `(i, j)` and `(j, i)`, so the adjacency is always
/// the full (symmetric) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adj: CsrMatrix,
    directed: bool,
    loops: bool,
}

/// One input edge record: `src dst [weight] [layer]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub src: usize,
    pub dst: usize,
    pub weight: Option<f64>,
    pub layer: Option<String>,
}

impl EdgeRecord {
    pub fn new(src: usize, dst: usize) -> Self {
        EdgeRecord {
            src,
            dst,
            weight: None,
            layer: None,
        }
    }

    pub fn weighted(src: usize, dst: usize, weight: f64) -> Self {
        EdgeRecord {
            src,
            dst,
            weight: Some(weight),
            layer: None,
        }
    }

    pub fn in_layer(mut self, layer: impl Into<String>) -> Self {
        self.layer = Some(layer.into());
        self
    }
}

impl Graph {
    /// Builds a graph from `(src, dst, weight)` triples.
    ///
    /// Repeated edges are accepted when their weights agree. For undirected graphs
    /// `(i, j)` and `(j, i)` name the same edge.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize, f64)],
        directed: bool,
        loops: bool,
    ) -> Result<Graph> {
        let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
        let mut order = Vec::new();
        for &(s, d, w) in edges {
            for v in [s, d] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if !w.is_finite() {
                return Err(Error::NonFinite {
                    row: s,
                    col: d,
                    value: w,
                });
            }
            if s == d && !loops {
                return Err(Error::LoopNotAllowed(s));
            }
            let key = if directed { (s, d) } else { (s.min(d), s.max(d)) };
            match seen.get(&key) {
                Some(&prev) if prev != w => {
                    return Err(Error::ConflictingWeight {
                        row: key.0,
                        col: key.1,
                        first: prev,
                        second: w,
                    })
                }
                Some(_) => {}
                None => {
                    seen.insert(key, w);
                    order.push(key);
                }
            }
        }
        let mut trips = Vec::with_capacity(order.len() * 2);
        for key in order {
            let w = seen[&key];
            trips.push((key.0, key.1, w));
            if !directed && key.0 != key.1 {
                trips.push((key.1, key.0, w));
            }
        }
        Ok(Graph {
            adj: CsrMatrix::from_triplets(n, n, trips)?,
            directed,
            loops,
        })
    }

    /// Unweighted convenience constructor.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)], directed: bool) -> Result<Graph> {
        let edges: Vec<_> = pairs.iter().map(|&(a, b)| (a, b, 1.0)).collect();
        let loops = pairs.iter().any(|&(a, b)| a == b);
        Graph::from_edges(n, &edges, directed, loops)
    }

    /// Wraps an adjacency matrix. Undirected input must be symmetric.
    pub fn from_adjacency(adj: CsrMatrix, directed: bool) -> Result<Graph> {
        if adj.nrows() != adj.ncols() {
            return Err(Error::Dimension(format!(
                "adjacency must be square, got {}x{}",
                adj.nrows(),
                adj.ncols()
            )));
        }
        if !directed && !adj.is_symmetric() {
            return Err(Error::InvalidArgument(
                "undirected graph needs a symmetric adjacency".into(),
            ));
        }
        let loops = adj.iter().any(|(i, j, _)| i == j);
        Ok(Graph {
            adj,
            directed,
            loops,
        })
    }

    pub fn empty(n: usize, directed: bool) -> Graph {
        Graph {
            adj: CsrMatrix::zeros(n, n),
            directed,
            loops: false,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.nrows()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn has_loops(&self) -> bool {
        self.loops
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adj
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::Sparse(self.adj.clone())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.adj.to_dense()
    }

    /// True when some stored weight differs from 1.
    pub fn is_weighted(&self) -> bool {
        self.adj.values().iter().any(|&w| w != 1.0)
    }

    /// Canonical edge list: every stored entry for directed graphs, `i <= j` for undirected.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.adj
            .iter()
            .filter(|&(i, j, _)| self.directed || i <= j)
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.adj.row_sums()
    }
}

/// Aligned layers over a common vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredGraph {
    layers: Vec<Graph>,
}

impl LayeredGraph {
    pub fn new(layers: Vec<Graph>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidArgument("a layered graph needs at least one layer".into()))?;
        if let Some(bad) = layers.iter().find(|g| g.n() != first.n()) {
            return Err(Error::Dimension(format!(
                "layer orders differ: {} vs {}",
                first.n(),
                bad.n()
            )));
        }
        Ok(LayeredGraph { layers })
    }

    pub fn layers(&self) -> &[Graph] {
        &self.layers
    }

    pub fn n(&self) -> usize {
        self.layers[0].n()
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// Sum of the layer adjacencies.
    pub fn union_adjacency(&self) -> DMatrix<f64> {
        self.layers
            .iter()
            .fold(DMatrix::zeros(self.n(), self.n()), |acc, g| acc + g.to_dense())
    }
}

/// Result of parsing an edge list: a single graph or, when a layer column is present, layers.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedGraph {
    Single(Graph),
    Layered(LayeredGraph),
}

impl ParsedGraph {
    pub fn into_layers(self) -> LayeredGraph {
        match self {
            ParsedGraph::Single(g) => LayeredGraph { layers: vec![g] },
            ParsedGraph::Layered(l) => l,
        }
    }
}

/// Builds a graph (or a layered graph, if any record carries a layer label) from edge records.
/// Missing weights default to 1. Layers are ordered by first appearance of their label.
pub fn graph_from_edge_list(
    records: &[EdgeRecord],
    n: usize,
    directed: bool,
    loops: bool,
) -> Result<ParsedGraph> {
    let triple = |r: &EdgeRecord| (r.src, r.dst, r.weight.unwrap_or(1.0));
    if records.iter().all(|r| r.layer.is_none()) {
        let edges: Vec<_> = records.iter().map(triple).collect();
        return Graph::from_edges(n, &edges, directed, loops).map(ParsedGraph::Single);
    }
    let mut names: Vec<&str> = Vec::new();
    let mut groups: Vec<Vec<(usize, usize, f64)>> = Vec::new();
    for r in records {
        let name = r.layer.as_deref().unwrap_or("");
        let idx = match names.iter().position(|&x| x == name) {
            Some(i) => i,
            None => {
                names.push(name);
                groups.push(Vec::new());
                names.len() - 1
            }
        };
        groups[idx].push(triple(r));
    }
    let layers = groups
        .iter()
        .map(|edges| Graph::from_edges(n, edges, directed, loops))
        .collect::<Result<Vec<_>>>()?;
    LayeredGraph::new(layers).map(ParsedGraph::Layered)
}

/// Pads `g` with isolated vertices up to `target_n`.
pub fn pad(g: &Graph, target_n: usize) -> Result<Graph> {
    if target_n < g.n() {
        return Err(Error::InvalidArgument(format!(
            "cannot pad a graph of order {} down to {}",
            g.n(),
            target_n
        )));
    }
    Ok(Graph {
        adj: g.adj.padded(target_n, target_n),
        directed: g.directed,
        loops: g.loops,
    })
}

/// Centering scheme for [`center_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterScheme {
    /// Affine rescale so the smallest entry becomes `lo` and the largest `hi`.
    Pair(f64, f64),
    /// Same as `Pair(-1.0, 1.0)`.
    Center,
    /// Leave the adjacency unchanged.
    Naive,
    /// Subtract the best rank-`r` approximation.
    Rank(usize),
}

/// Recodes the adjacency so that non-edges carry a penalty, returned in sparse-plus-low-rank form.
pub fn center_graph(g: &Graph, scheme: CenterScheme) -> Result<SplrMatrix> {
    let n = g.n();
    let adj = g.adjacency();
    match scheme {
        CenterScheme::Naive => {
            SplrMatrix::new(adj.clone(), DMatrix::zeros(n, 0), DMatrix::zeros(n, 0))
        }
        CenterScheme::Center => center_graph(g, CenterScheme::Pair(-1.0, 1.0)),
        CenterScheme::Pair(lo, hi) => {
            if !(lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "centering pair needs lo < hi, got ({lo}, {hi})"
                )));
            }
            let has_zero = adj.nnz() < n * n;
            let stored = adj.values().iter().copied();
            let mut min = stored.clone().fold(f64::INFINITY, f64::min);
            let mut max = stored.fold(f64::NEG_INFINITY, f64::max);
            if has_zero {
                min = min.min(0.0);
                max = max.max(0.0);
            }
            if n == 0 || !(max > min) {
                return Err(Error::InvalidArgument(
                    "constant adjacency cannot be rescaled".into(),
                ));
            }
            let scale = (hi - lo) / (max - min);
            let shift = lo - min * scale;
            let sparse = adj.map_values(|v| v * scale);
            SplrMatrix::new(
                sparse,
                DMatrix::from_element(n, 1, shift),
                DMatrix::from_element(n, 1, 1.0),
            )
        }
        CenterScheme::Rank(r) => {
            if r == 0 || r >= n {
                return Err(Error::InvalidArgument(format!(
                    "rank centering needs 1 <= r < n, got r = {r}, n = {n}"
                )));
            }
            let dense = adj.to_dense();
            let (left, right) = if g.is_directed() {
                let svd = dense.svd(true, true);
                let u = svd.u.ok_or_else(|| Error::Numerical("svd failed".into()))?;
                let vt = svd.v_t.ok_or_else(|| Error::Numerical("svd failed".into()))?;
                let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
                idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
                let idx = &idx[..r];
                let mut left = u.select_columns(idx);
                for (c, &k) in idx.iter().enumerate() {
                    left.column_mut(c).scale_mut(-svd.singular_values[k]);
                }
                (left, vt.transpose().select_columns(idx))
            } else {
                let eig = SymmetricEigen::new(dense);
                let mut idx: Vec<usize> = (0..n).collect();
                idx.sort_by(|&a, &b| {
                    eig.eigenvalues[b]
                        .abs()
                        .total_cmp(&eig.eigenvalues[a].abs())
                        .then(a.cmp(&b))
                });
                let idx = &idx[..r];
                let right = eig.eigenvectors.select_columns(idx);
                let mut left = right.clone();
                for (c, &k) in idx.iter().enumerate() {
                    left.column_mut(c).scale_mut(-eig.eigenvalues[k]);
                }
                (left, right)
            };
            SplrMatrix::new(adj.clone(), left, right)
        }
    }
}

/// Splits `g` into one layer per distinct label. `labels` is aligned with [`Graph::edges`].
pub fn split_layers<L: PartialEq + Clone>(g: &Graph, labels: &[L]) -> Result<LayeredGraph> {
    let edges = g.edges();
    if edges.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} labels for {} edges",
            labels.len(),
            edges.len()
        )));
    }
    let mut seen: Vec<L> = Vec::new();
    let mut groups: Vec<Vec<(usize, usize, f64)>> = Vec::new();
    for (e, l) in edges.into_iter().zip(labels) {
        let idx = match seen.iter().position(|x| x == l) {
            Some(i) => i,
            None => {
                seen.push(l.clone());
                groups.push(Vec::new());
                seen.len() - 1
            }
        };
        groups[idx].push(e);
    }
    if groups.is_empty() {
        return LayeredGraph::new(vec![g.clone()]);
    }
    let layers = groups
        .iter()
        .map(|es| Graph::from_edges(g.n(), es, g.directed, g.loops))
        .collect::<Result<Vec<_>>>()?;
    LayeredGraph::new(layers)
}

/// Weakly connected component labels, numbered by smallest member vertex.
pub fn components(adj: &CsrMatrix) -> Vec<usize> {
    let n = adj.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j, _) in adj.iter() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            parent[hi] = lo;
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Mask of the largest weakly connected component (by vertex count). Ties go to the component
/// holding the smallest vertex index.
pub fn largest_cc(g: &Graph) -> Vec<bool> {
    let labels = components(g.adjacency());
    let n = labels.len();
    let mut sizes = vec![0usize; n];
    for &l in &labels {
        sizes[l] += 1;
    }
    // roots are component minima, so scanning upward keeps the first maximum
    let best = (0..n).fold(None, |best: Option<usize>, r| match best {
        Some(b) if sizes[b] >= sizes[r] => Some(b),
        _ if sizes[r] > 0 => Some(r),
        other => other,
    });
    labels.iter().map(|&l| Some(l) == best).collect()
}

/// Graph operands accepted by the matching algorithms: one matrix per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Layers(pub Vec<Matrix>);

impl Layers {
    pub fn n(&self) -> usize {
        self.0.first().map_or(0, |m| m.nrows())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Matrix> {
        self.0.iter()
    }

    pub(crate) fn validate(&self, name: &str) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::InvalidArgument(format!("{name} has no layers")));
        }
        let n = self.n();
        for m in &self.0 {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Dimension(format!(
                    "{name} layers must all be {n}x{n}, found {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(())
    }

    pub fn padded(&self, n: usize) -> Layers {
        Layers(self.0.iter().map(|m| m.padded(n)).collect())
    }

    pub fn is_symmetric(&self) -> bool {
        self.0.iter().all(|m| m.is_symmetric(1e-12))
    }
}

impl From<&Graph> for Layers {
    fn from(g: &Graph) -> Self {
        Layers(vec![g.to_matrix()])
    }
}

impl From<Graph> for Layers {
    fn from(g: Graph) -> Self {
        Layers::from(&g)
    }
}

impl From<&LayeredGraph> for Layers {
    fn from(g: &LayeredGraph) -> Self {
        Layers(g.layers().iter().map(Graph::to_matrix).collect())
    }
}

impl From<Matrix> for Layers {
    fn from(m: Matrix) -> Self {
        Layers(vec![m])
    }
}

impl From<SplrMatrix> for Layers {
    fn from(m: SplrMatrix) -> Self {
        Layers(vec![Matrix::Splr(m)])
    }
}

impl From<DMatrix<f64>> for Layers {
    fn from(m: DMatrix<f64>) -> Self {
        Layers(vec![Matrix::Dense(m)])
    }
}

impl From<Vec<Matrix>> for Layers {
    fn from(v: Vec<Matrix>) -> Self {
        Layers(v)
    }
}

impl From<&[Graph]> for Layers {
    fn from(v: &[Graph]) -> Self {
        Layers(v.iter().map(Graph::to_matrix).collect())
    }
}
