//! Recoding adjacency matrices before matching, and graphs of different orders.

use graphmatch::frame::SeedSet;
use graphmatch::gm::{gm, Method};
use graphmatch::graph::{center_graph, pad, CenterScheme, Graph, Layers};
use graphmatch::matrix::Matrix;
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams};

fn main() -> graphmatch::Result<()> {
    let g = Graph::from_pairs(5, &[(0, 1), (1, 2), (1, 4), (2, 4)], false)?;
    println!("center:\n{}", center_graph(&g, CenterScheme::Center)?.to_dense());
    println!("rank 2:\n{:.4}", center_graph(&g, CenterScheme::Rank(2))?.to_dense());
    println!("padded to 7: {} vertices, {} edges", pad(&g, 7)?.n(), pad(&g, 7)?.edge_count());

    // B is A with 10 extra vertices; A is padded internally
    let (big, _) = sample_correlated_gnp_pair(&CorrGnpParams::new(60, 0.2, 1.0), 8)?;
    let keep: Vec<usize> = (0..50).collect();
    let small = Graph::from_adjacency(big.adjacency().submatrix(&keep, &keep), false)?;
    let seeds = SeedSet::new((0..5).map(|v| (v, v)).collect(), 50, 60)?;
    for scheme in [CenterScheme::Naive, CenterScheme::Center] {
        let a = Layers::from(Matrix::Splr(center_graph(&small, scheme)?));
        let b = Layers::from(Matrix::Splr(center_graph(&big, scheme)?));
        let m = gm(a, b, &seeds, None, &Method::from_name("indefinite")?)?;
        let hits = m.corr().iter().filter(|&&(i, j)| i == j).count();
        println!("{scheme:?}: {} pairs, {hits} correct", m.len());
    }
    Ok(())
}
