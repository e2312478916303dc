//! Matching graphs with several edge types.

use graphmatch::frame::SeedSet;
use graphmatch::gm::{gm, Method};
use graphmatch::graph::{split_layers, Graph, LayeredGraph};
use graphmatch::metrics::match_summary;
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams, PairOptions};
use graphmatch::rng;

fn main() -> graphmatch::Result<()> {
    let n = 60;
    let perm = rng::permutation(n, &mut rng::rng(8));
    let mut la = Vec::new();
    let mut lb = Vec::new();
    for (k, p) in [0.05, 0.1, 0.2].into_iter().enumerate() {
        let params = CorrGnpParams {
            options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
            ..CorrGnpParams::new(n, p, 0.6)
        };
        let (a, b) = sample_correlated_gnp_pair(&params, 30 + k as u64)?;
        la.push(a);
        lb.push(b);
    }
    let (a, b) = (LayeredGraph::new(la)?, LayeredGraph::new(lb)?);
    let seeds = SeedSet::new((0..4).map(|v| (v, perm[v])).collect(), n, n)?;
    let truth = perm.clone();

    for method in ["indefinite", "percolation"] {
        let m = gm(&a, &b, &seeds, None, &Method::from_name(method)?)?;
        let s = match_summary(&m, &a, &b, Some(&truth))?;
        let per_layer: Vec<String> = s.layers.iter().map(|l| format!("{}/{}", l.common_edges, l.common_edges + l.missing_edges)).collect();
        println!("{method}: {:?} correct of {}, common edges per layer {per_layer:?}", s.n_true_matches, s.n_matches);
    }

    // one edge list with a label per edge
    let g = Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], false)?;
    let labels = ["road", "rail", "road", "rail"];
    let split = split_layers(&g, &labels)?;
    println!("split into {} layers with {:?} edges", split.len(), split.layers().iter().map(Graph::edge_count).collect::<Vec<_>>());
    Ok(())
}
