//! Edge summaries, row statistics and vertex ranking for a finished match.

use graphmatch::frame::SeedSet;
use graphmatch::gm::{gm, Method};
use graphmatch::metrics::*;
use graphmatch::models::{sample_correlated_gnp_pair, CorrGnpParams, PairOptions};

fn main() -> graphmatch::Result<()> {
    // 40 core vertices and 10 junk ones
    let (n, n_core) = (50, 40);
    let params = CorrGnpParams {
        options: PairOptions { ncore: Some(n_core), ..PairOptions::default() },
        ..CorrGnpParams::new(n, 0.3, 0.8)
    };
    let (a, b) = sample_correlated_gnp_pair(&params, 21)?;
    let truth: Vec<usize> = (0..n).collect();
    let seeds = SeedSet::new((0..5).map(|v| (v, v)).collect(), n, n)?;
    let m = gm(&a, &b, &seeds, None, &Method::from_name("indefinite")?)?;

    let s = match_summary(&m, &a, &b, Some(&truth))?;
    let l = &s.layers[0];
    println!(
        "common {} missing {} extra {} fnorm {:.3}; {} of {} non-seed matches correct",
        l.common_edges, l.missing_edges, l.extra_edges, l.fnorm, s.n_true_matches.unwrap_or(0), s.n_matches
    );
    println!("edge correctness {:.3}, largest common subgraph {}", edge_correctness(&s)?, lccs_size(&m, &a, &b)?);

    let v = 10;
    println!(
        "vertex {v}: row diff {:?}, row cor {:?}, permutation statistic {:?}",
        row_stat(v, &m, &a, &b, RowStat::Diff)?,
        row_stat(v, &m, &a, &b, RowStat::Cor)?,
        row_perm_stat(v, &m, &a, &b, RowStat::Diff, 100, 1)?,
    );

    let ranking = best_matches(&m, &a, &b, &BestMatchOptions::default(), Some(&truth))?;
    for r in ranking.iter().take(5) {
        println!("  {} -> {}  T = {:?}  precision so far {:?}", r.a_vertex, r.b_vertex, r.measure_value, r.precision);
    }
    let (core, junk) = core_junk_precision(&ranking, n_core - seeds.len(), n - n_core)?;
    println!("core share of the top 10: {:.2}; junk share of the bottom 10: {:.2}", core[9], junk[9]);
    Ok(())
}
