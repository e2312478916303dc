//! Correlated random graph pairs.

use graphmatch::graph::Graph;
use graphmatch::models::*;
use nalgebra::DMatrix;

/// Empirical Pearson correlation of aligned off-diagonal entries.
fn entry_corr(a: &Graph, b: &Graph) -> f64 {
    let (x, y) = (a.to_dense(), b.to_dense());
    let n = a.n();
    let mut v = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            v.push((x[(i, j)], y[(i, j)]));
        }
    }
    let k = v.len() as f64;
    let (mx, my) = (v.iter().map(|e| e.0).sum::<f64>() / k, v.iter().map(|e| e.1).sum::<f64>() / k);
    let cov = v.iter().map(|e| (e.0 - mx) * (e.1 - my)).sum::<f64>() / k;
    cov / (mx * (1.0 - mx) * my * (1.0 - my)).sqrt()
}

fn main() -> graphmatch::Result<()> {
    println!("feasible correlation at p = 0.1: {:?}", corr_range(0.1));

    let (a, b) = sample_correlated_gnp_pair(&CorrGnpParams::new(200, 0.1, 0.7), 1)?;
    println!("gnp: {} and {} edges, entry correlation {:.3}", a.edge_count(), b.edge_count(), entry_corr(&a, &b));

    let pref = DMatrix::from_row_slice(2, 2, &[0.3, 0.02, 0.02, 0.2]);
    let (a, b) = sample_correlated_sbm_pair(&[100, 100], &pref, 0.5, None, &PairOptions::default(), 2)?;
    println!("sbm: {} and {} edges, entry correlation {:.3}", a.edge_count(), b.edge_count(), entry_corr(&a, &b));

    // per-entry probabilities and correlations
    let n = 100;
    let p = DMatrix::from_fn(n, n, |i, j| 0.05 + 0.3 * ((i + j) % 3) as f64 / 2.0);
    let c = DMatrix::from_element(n, n, 0.6);
    let (a, b) = sample_correlated_ieg_pair(&p, &c, &PairOptions::default(), 3)?;
    println!("ieg: {} and {} edges, entry correlation {:.3}", a.edge_count(), b.edge_count(), entry_corr(&a, &b));

    let x = DMatrix::from_fn(n, 2, |i, k| if k == 0 { 0.2 + 0.5 * (i as f64 / n as f64) } else { 0.3 });
    let (a, b) = sample_correlated_rdpg_pair(&x, 0.8, &PairOptions::default(), 4)?;
    println!("rdpg: {} and {} edges, entry correlation {:.3}", a.edge_count(), b.edge_count(), entry_corr(&a, &b));

    // the last 20 vertices are junk: their entries are independent across the pair
    let params = CorrGnpParams {
        options: PairOptions { ncore: Some(80), directed: true, ..PairOptions::default() },
        ..CorrGnpParams::new(100, 0.2, 0.9)
    };
    let (a, b) = sample_correlated_gnp_pair(&params, 5)?;
    println!("directed with junk: {} and {} arcs", a.edge_count(), b.edge_count());
    Ok(())
}
