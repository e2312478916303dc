//! Correlated random graph pairs.
//!
//! Every sampler reduces to independent aligned entries: `A_ij ~ Bernoulli(p_ij)`, then
//! `B_ij ~ Bernoulli(p_ij + ρ(1 − p_ij))` when `A_ij = 1` and `Bernoulli(p_ij(1 − ρ))` otherwise,
//! which gives both marginals `p_ij` and Pearson correlation `ρ`. Entries touching a junk
//! vertex (index `>= ncore`) use `ρ = 0`. Graph 2 is then relabeled so that vertex `i` of
//! graph 1 corresponds to vertex `permutation[i]` of graph 2.

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Options shared by all samplers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PairOptions {
    pub directed: bool,
    pub loops: bool,
    /// Vertices `0..ncore` are correlated across the pair; the rest are junk. Default: all.
    pub ncore: Option<usize>,
    /// Relabeling of graph 2; identity when absent.
    pub permutation: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrGnpParams {
    pub n: usize,
    pub p: f64,
    pub corr: f64,
    pub options: PairOptions,
}

impl CorrGnpParams {
    pub fn new(n: usize, p: f64, corr: f64) -> Self {
        CorrGnpParams { n, p, corr, options: PairOptions::default() }
    }
}

/// Feasible correlations for marginal `p`: `[max(−p/(1−p), (p−1)/p), 1]`.
pub fn corr_range(p: f64) -> (f64, f64) {
    if p <= 0.0 || p >= 1.0 {
        return (-1.0, 1.0);
    }
    ((-p / (1.0 - p)).max((p - 1.0) / p), 1.0)
}

fn check_entry(p: f64, c: f64, at: (usize, usize)) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InfeasibleParameters(format!(
            "probability {p} at ({}, {}) is outside [0, 1]",
            at.0, at.1
        )));
    }
    let (lo, hi) = corr_range(p);
    if !(c >= lo - 1e-12 && c <= hi + 1e-12) {
        return Err(Error::InfeasibleParameters(format!(
            "correlation {c} at ({}, {}) is outside [{lo}, {hi}] for p = {p}",
            at.0, at.1
        )));
    }
    Ok(())
}

/// Overlap form of the correlated model: `s′ = p + ρ(1 − p)`, `p′ = p / s′`.
pub fn corr_to_overlap_params(p: f64, rho: f64) -> Result<(f64, f64)> {
    if rho < 0.0 {
        return Err(Error::InfeasibleParameters(format!(
            "the overlap form needs nonnegative correlation, got {rho}"
        )));
    }
    if !(0.0..=1.0).contains(&p) || rho > 1.0 {
        return Err(Error::InfeasibleParameters(format!("p = {p}, rho = {rho} out of range")));
    }
    let s = p + rho * (1.0 - p);
    let p_prime = if s == 0.0 { 1.0 } else { p / s };
    Ok((p_prime, s))
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Dimension(format!("permutation has {} entries for {n} vertices", perm.len())));
    }
    let mut seen = vec![false; n];
    for &v in perm {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidArgument("permutation is not a bijection of 0..n".into()));
        }
    }
    Ok(())
}

/// Core sampler over entries `(i, j)` with probability `prob(i, j)` and correlation `corr(i, j)`.
fn sample_pair(
    n: usize,
    prob: impl Fn(usize, usize) -> f64,
    corr: impl Fn(usize, usize) -> f64,
    opts: &PairOptions,
    rng_seed: u64,
) -> Result<(Graph, Graph)> {
    let ncore = opts.ncore.unwrap_or(n);
    if ncore > n {
        return Err(Error::InvalidArgument(format!("ncore {ncore} exceeds n = {n}")));
    }
    if let Some(p) = &opts.permutation {
        check_permutation(p, n)?;
    }
    let mut r = rng::rng(rng_seed);
    let (mut e1, mut e2) = (Vec::new(), Vec::new());
    for i in 0..n {
        let from = if opts.directed { 0 } else { i };
        for j in from..n {
            if i == j && !opts.loops {
                continue;
            }
            let p = prob(i, j);
            let c = if i < ncore && j < ncore { corr(i, j) } else { 0.0 };
            check_entry(p, c, (i, j))?;
            let a = r.random::<f64>() < p;
            let q = if a { p + c * (1.0 - p) } else { p * (1.0 - c) };
            let b = r.random::<f64>() < q.clamp(0.0, 1.0);
            if a {
                e1.push((i, j, 1.0));
            }
            if b {
                e2.push((i, j, 1.0));
            }
        }
    }
    if let Some(perm) = &opts.permutation {
        for e in &mut e2 {
            *e = (perm[e.0], perm[e.1], 1.0);
        }
    }
    Ok((
        Graph::from_edges(n, &e1, opts.directed, opts.loops)?,
        Graph::from_edges(n, &e2, opts.directed, opts.loops)?,
    ))
}

/// Correlated Erdős–Rényi pair: both graphs marginally `G(n, p)`, aligned entries correlated `ρ`.
pub fn sample_correlated_gnp_pair(params: &CorrGnpParams, rng_seed: u64) -> Result<(Graph, Graph)> {
    check_entry(params.p, params.corr, (0, 0))?;
    sample_pair(params.n, |_, _| params.p, |_, _| params.corr, &params.options, rng_seed)
}

/// Inhomogeneous pair: entry `(i, j)` has its own probability and correlation. For undirected
/// graphs only the upper triangle (and diagonal, with loops) is read.
pub fn sample_correlated_ieg_pair(
    p_mat: &DMatrix<f64>,
    c_mat: &DMatrix<f64>,
    opts: &PairOptions,
    rng_seed: u64,
) -> Result<(Graph, Graph)> {
    let n = p_mat.nrows();
    if p_mat.ncols() != n || c_mat.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "probability {:?} and correlation {:?} must both be n×n",
            p_mat.shape(),
            c_mat.shape()
        )));
    }
    sample_pair(n, |i, j| p_mat[(i, j)], |i, j| c_mat[(i, j)], opts, rng_seed)
}

/// Stochastic block model pair. Vertices are laid out block by block; with `core_block_sizes`,
/// all core vertices come first (block by block) and the junk vertices after them, so that
/// `ncore = Σ core_block_sizes`.
pub fn sample_correlated_sbm_pair(
    block_sizes: &[usize],
    pref: &DMatrix<f64>,
    corr: f64,
    core_block_sizes: Option<&[usize]>,
    opts: &PairOptions,
    rng_seed: u64,
) -> Result<(Graph, Graph)> {
    let k = block_sizes.len();
    if pref.shape() != (k, k) {
        return Err(Error::Dimension(format!(
            "preference matrix is {:?} for {k} blocks",
            pref.shape()
        )));
    }
    if !opts.directed && pref != &pref.transpose() {
        return Err(Error::InvalidArgument("undirected SBM needs a symmetric preference matrix".into()));
    }
    let mut block = Vec::new();
    let mut ncore = None;
    match core_block_sizes {
        None => {
            for (b, &s) in block_sizes.iter().enumerate() {
                block.extend(std::iter::repeat_n(b, s));
            }
        }
        Some(core) => {
            if core.len() != k || core.iter().zip(block_sizes).any(|(c, s)| c > s) {
                return Err(Error::Dimension("core block sizes must fit inside the blocks".into()));
            }
            for (b, &c) in core.iter().enumerate() {
                block.extend(std::iter::repeat_n(b, c));
            }
            for (b, (&s, &c)) in block_sizes.iter().zip(core).enumerate() {
                block.extend(std::iter::repeat_n(b, s - c));
            }
            ncore = Some(core.iter().sum());
        }
    }
    let opts = PairOptions { ncore: ncore.or(opts.ncore), ..opts.clone() };
    sample_pair(block.len(), |i, j| pref[(block[i], block[j])], |_, _| corr, &opts, rng_seed)
}

/// Random dot product graph pair: entry probability `<x_i, x_j>` from the latent rows.
pub fn sample_correlated_rdpg_pair(
    latent: &DMatrix<f64>,
    corr: f64,
    opts: &PairOptions,
    rng_seed: u64,
) -> Result<(Graph, Graph)> {
    let n = latent.nrows();
    let p = latent * latent.transpose();
    for i in 0..n {
        for j in 0..n {
            let v = p[(i, j)];
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(Error::InfeasibleParameters(format!(
                    "latent inner product {v} at ({i}, {j}) is outside [0, 1]"
                )));
            }
        }
    }
    sample_pair(n, |i, j| p[(i, j)].clamp(0.0, 1.0), |_, _| corr, opts, rng_seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_params() {
        assert_eq!(corr_to_overlap_params(0.3, 0.0).unwrap(), (1.0, 0.3));
        let (pp, s) = corr_to_overlap_params(0.5, 0.5).unwrap();
        assert!((s - 0.75).abs() < 1e-15 && (pp - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(corr_to_overlap_params(0.3, 1.0).unwrap(), (0.3, 1.0));
        assert!(corr_to_overlap_params(0.3, -0.1).is_err());
    }

    #[test]
    fn full_correlation_gives_identical_graphs() {
        let (a, b) = sample_correlated_gnp_pair(&CorrGnpParams::new(30, 0.2, 1.0), 7).unwrap();
        assert_eq!(a, b);
        assert!(a.edge_count() > 0);
    }

    #[test]
    fn zero_probability_is_empty() {
        let (a, b) = sample_correlated_gnp_pair(&CorrGnpParams::new(10, 0.0, 0.5), 1).unwrap();
        assert_eq!(a.edge_count() + b.edge_count(), 0);
    }

    #[test]
    fn infeasible_correlation() {
        // p = 0.3: lower bound is max(-0.4286, -2.333) = -0.4286
        assert!(sample_correlated_gnp_pair(&CorrGnpParams::new(5, 0.3, -0.5), 1).is_err());
        assert!(sample_correlated_gnp_pair(&CorrGnpParams::new(5, 0.3, -0.4), 1).is_ok());
        let err = sample_correlated_ieg_pair(
            &DMatrix::from_element(2, 2, 0.9),
            &DMatrix::from_element(2, 2, -0.5),
            &PairOptions::default(),
            0,
        )
        .unwrap_err();
        assert!(err.to_string().contains("(0, 1)"));
    }

    #[test]
    fn permutation_relabels_graph_two() {
        let perm = vec![2, 0, 1];
        let params = CorrGnpParams {
            options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
            ..CorrGnpParams::new(3, 1.0, 1.0)
        };
        let (a, b) = sample_correlated_gnp_pair(&params, 0).unwrap();
        assert_eq!(a.edge_count(), 3);
        for (i, j, _) in a.edges() {
            assert!(b.adjacency().get(perm[i], perm[j]) == 1.0);
        }
    }

    #[test]
    fn same_seed_same_output() {
        let p = CorrGnpParams::new(40, 0.3, 0.5);
        assert_eq!(sample_correlated_gnp_pair(&p, 9).unwrap(), sample_correlated_gnp_pair(&p, 9).unwrap());
        assert_ne!(sample_correlated_gnp_pair(&p, 9).unwrap(), sample_correlated_gnp_pair(&p, 10).unwrap());
    }

    #[test]
    fn zero_row_isolates_vertex() {
        let mut p = DMatrix::from_element(4, 4, 0.9);
        p.row_mut(1).fill(0.0);
        p.column_mut(1).fill(0.0);
        let (a, b) = sample_correlated_ieg_pair(&p, &DMatrix::from_element(4, 4, 0.5), &PairOptions::default(), 3).unwrap();
        assert_eq!(a.degrees()[1], 0.0);
        assert_eq!(b.degrees()[1], 0.0);
    }

    #[test]
    fn rdpg_zero_position_is_isolated() {
        let x = DMatrix::from_column_slice(4, 1, &[1.0, 0.0, 1.0, 1.0]);
        let (a, _) = sample_correlated_rdpg_pair(&x, 0.5, &PairOptions::default(), 0).unwrap();
        assert_eq!(a.degrees()[1], 0.0);
        assert_eq!(a.edge_count(), 3);
        let bad = DMatrix::from_column_slice(2, 1, &[2.0, 1.0]);
        assert!(sample_correlated_rdpg_pair(&bad, 0.5, &PairOptions::default(), 0).is_err());
    }

    #[test]
    fn sbm_core_vertices_come_first() {
        let pref = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let (a, b) = sample_correlated_sbm_pair(&[3, 2], &pref, 1.0, Some(&[2, 1]), &PairOptions::default(), 0).unwrap();
        // layout: core of block 0 (0, 1), core of block 1 (2), junk of block 0 (3), junk of block 1 (4)
        let adj = a.adjacency();
        assert_eq!(adj.get(0, 1), 1.0);
        assert_eq!(adj.get(0, 3), 1.0);
        assert_eq!(adj.get(2, 4), 1.0);
        assert_eq!(adj.get(0, 2), 0.0);
        assert_eq!(b.adjacency().get(0, 1), 1.0);
    }
}
