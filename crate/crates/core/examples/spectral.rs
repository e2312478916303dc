//! Umeyama on an isomorphic pair and IsoRank driven by a similarity prior.

use graphmatch::frame::SeedSet;
use graphmatch::graph::Graph;
use graphmatch::lap::LapMethod;
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams, PairOptions};
use graphmatch::rng;
use graphmatch::spectral::{gm_isorank, gm_umeyama, Extraction, IsoRankConfig};
use nalgebra::DMatrix;
use rand::Rng;

fn main() -> graphmatch::Result<()> {
    // corr = 1 gives B as an exact relabeling of A
    let n = 12;
    let perm = rng::permutation(n, &mut rng::rng(9));
    let params = CorrGnpParams {
        options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
        ..CorrGnpParams::new(n, 0.4, 1.0)
    };
    let (a, b) = sample_correlated_gnp_pair(&params, 3)?;
    let m = gm_umeyama(&a, &b, &SeedSet::empty(), None, LapMethod::Dense)?;
    let hits = m.corr().iter().filter(|&&(i, j)| perm[i] == j).count();
    println!("umeyama: {hits}/{n} recovered");

    // directed graphs go through the Hermitian form
    let d = Graph::from_pairs(5, &[(0, 1), (1, 2), (2, 3), (3, 1), (0, 4), (4, 2), (1, 4)], true)?;
    let m = gm_umeyama(&d, &d, &SeedSet::empty(), None, LapMethod::Dense)?;
    println!("umeyama, directed self-match: {:?}", m.corr());

    // a noisy prior that favors the truth
    let mut r = rng::rng(12);
    let s = DMatrix::from_fn(n, n, |i, j| r.random::<f64>() + if perm[i] == j { 0.5 } else { 0.0 });
    for extraction in [Extraction::Lap, Extraction::Greedy] {
        let config = IsoRankConfig { extraction, ..IsoRankConfig::default() };
        let m = gm_isorank(&a, &b, &SeedSet::empty(), Some(&s), &config)?;
        let hits = m.corr().iter().filter(|&&(i, j)| perm[i] == j).count();
        println!("isorank {extraction:?}: {hits}/{n} correct after {} iterations", m.details["iter"]);
    }
    Ok(())
}
