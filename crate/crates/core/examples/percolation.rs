//! Seeded percolation and its expand-when-stuck variant.

use graphmatch::frame::{nonseed_matches, MatchResult, SeedSet};
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams, PairOptions};
use graphmatch::percolation::{gm_expand_when_stuck, gm_percolation};
use graphmatch::rng;

fn main() -> graphmatch::Result<()> {
    let n = 150;
    let perm = rng::permutation(n, &mut rng::rng(2));
    let params = CorrGnpParams {
        options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
        ..CorrGnpParams::new(n, 0.1, 0.9)
    };
    let (a, b) = sample_correlated_gnp_pair(&params, 5)?;

    for ns in [2, 5, 15] {
        let seeds = SeedSet::new((0..ns).map(|v| (v, perm[v])).collect(), n, n)?;
        for r in [2.0, 3.0] {
            let plain = gm_percolation(&a, &b, &seeds, None, r)?;
            let expand = gm_expand_when_stuck(&a, &b, &seeds, None, r)?;
            let score = |m: &MatchResult| {
                let free = nonseed_matches(m);
                let hits = free.iter().filter(|&&(i, j)| perm[i] == j).count();
                format!("{hits}/{} correct", free.len())
            };
            println!("seeds {ns:>2}, r {r}: percolation {:<14} expand {}", score(&plain), score(&expand));
        }
    }
    Ok(())
}
