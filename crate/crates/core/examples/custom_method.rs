//! Plugging a user-written matcher into `gm`: a random permutation of the non-seed vertices.

use graphmatch::frame::{make_match, Details, MatchResult, SeedSet};
use graphmatch::gm::{gm, Method};
use graphmatch::graph::Layers;
use graphmatch::metrics::match_summary;
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams};
use graphmatch::rng;
use nalgebra::DMatrix;

fn random_match(a: &Layers, b: &Layers, seeds: &SeedSet, _: Option<&DMatrix<f64>>) -> graphmatch::Result<MatchResult> {
    let n = a.n().max(b.n());
    let used_a: Vec<usize> = seeds.pairs().iter().map(|p| p.0).collect();
    let used_b: Vec<usize> = seeds.pairs().iter().map(|p| p.1).collect();
    let free_a: Vec<usize> = (0..n).filter(|v| !used_a.contains(v)).collect();
    let mut free_b: Vec<usize> = (0..n).filter(|v| !used_b.contains(v)).collect();
    let order = rng::permutation(free_b.len(), &mut rng::rng(99));
    free_b = order.iter().map(|&k| free_b[k]).collect();
    let mut corr = seeds.pairs().to_vec();
    corr.extend(free_a.into_iter().zip(free_b));
    let mut details = Details::new();
    details.insert("method".into(), "random".into());
    make_match(corr, (a.n(), b.n()), seeds, None, details)
}

fn main() -> graphmatch::Result<()> {
    let n = 50;
    let (a, b) = sample_correlated_gnp_pair(&CorrGnpParams::new(n, 0.3, 0.8), 4)?;
    let seeds = SeedSet::new((0..5).map(|v| (v, v)).collect(), n, n)?;
    let truth: Vec<usize> = (0..n).collect();

    let random = gm(&a, &b, &seeds, None, &random_match)?;
    let fw = gm(&a, &b, &seeds, None, &Method::from_name("indefinite")?)?;
    for (name, m) in [("random", &random), ("indefinite", &fw)] {
        let s = match_summary(&m, &a, &b, Some(&truth))?;
        println!("{name:<10} {:?} of {} correct, fnorm {:.2}", s.n_true_matches, s.n_matches, s.layers[0].fnorm);
    }
    Ok(())
}
