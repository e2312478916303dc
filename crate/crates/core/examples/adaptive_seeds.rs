//! Adaptive seeding: match, rank the result, promote the best pairs to seeds and match again.

use graphmatch::frame::{nonseed_matches, MatchResult, SeedSet};
use graphmatch::gm::{gm, Method};
use graphmatch::metrics::{best_matches, BestMatchOptions};
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams, PairOptions};
use graphmatch::rng;

fn main() -> graphmatch::Result<()> {
    let n = 100;
    let perm = rng::permutation(n, &mut rng::rng(6));
    let params = CorrGnpParams {
        options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
        ..CorrGnpParams::new(n, 0.2, 0.7)
    };
    let (a, b) = sample_correlated_gnp_pair(&params, 17)?;
    let hard = SeedSet::new((0..3).map(|v| (v, perm[v])).collect(), n, n)?;
    let method = Method::from_name("indefinite")?;
    let first = gm(&a, &b, &hard, None, &method)?;
    let precision = |m: &MatchResult| {
        let free = nonseed_matches(m);
        free.iter().filter(|&&(i, j)| perm[i] == j).count() as f64 / free.len() as f64
    };
    println!("first pass: {:.3}", precision(&first));

    let ranking = best_matches(&first, &a, &b, &BestMatchOptions::default(), None)?;
    for ns in [5, 10, 20] {
        let mut pairs = hard.pairs().to_vec();
        pairs.extend(ranking.iter().take(ns).map(|r| (r.a_vertex, r.b_vertex)));
        let correct = pairs.iter().filter(|&&(i, j)| perm[i] == j).count() - hard.len();
        let m = gm(&a, &b, &SeedSet::new(pairs, n, n)?, None, &method)?;
        println!("promote {ns:>2} ({correct} correct): {:.3}", precision(&m));
    }
    Ok(())
}
