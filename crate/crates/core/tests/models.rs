mod common;

use common::stats::{collect, Stats};
use graphmatch::models::*;
use nalgebra::DMatrix;
use proptest::prelude::*;

const TRIALS: u64 = 400;

#[test]
fn gnp_marginals_and_correlation() {
    for (p, rho) in [(0.3, 0.6), (0.3, -0.3), (0.1, 0.9)] {
        let mut st = Stats::default();
        for t in 0..TRIALS {
            let (a, b) = sample_correlated_gnp_pair(&CorrGnpParams::new(50, p, rho), t).unwrap();
            collect(&a, &b, &mut st, |_, _| true);
        }
        assert!((st.density_a() - p).abs() < 0.02, "p={p} rho={rho} density A {}", st.density_a());
        assert!((st.density_b() - p).abs() < 0.02, "density B {}", st.density_b());
        assert!((st.corr() - rho).abs() < 0.05, "p={p} rho={rho} corr {}", st.corr());
    }
}

#[test]
fn junk_vertices_are_uncorrelated() {
    let params = CorrGnpParams {
        options: PairOptions { ncore: Some(30), ..PairOptions::default() },
        ..CorrGnpParams::new(50, 0.3, 0.8)
    };
    let (mut core, mut junk) = (Stats::default(), Stats::default());
    for t in 0..TRIALS {
        let (a, b) = sample_correlated_gnp_pair(&params, t).unwrap();
        collect(&a, &b, &mut core, |i, j| i < 30 && j < 30);
        collect(&a, &b, &mut junk, |_, j| j >= 30);
    }
    assert!((core.corr() - 0.8).abs() < 0.05);
    assert!(junk.corr().abs() < 0.05);
    assert!((junk.density_b() - 0.3).abs() < 0.02);
}

#[test]
fn directed_pairs_use_every_ordered_entry() {
    let params = CorrGnpParams {
        options: PairOptions { directed: true, ..PairOptions::default() },
        ..CorrGnpParams::new(30, 0.4, 0.5)
    };
    let mut st = Stats::default();
    for t in 0..200 {
        let (a, b) = sample_correlated_gnp_pair(&params, t).unwrap();
        let (da, db) = (a.to_dense(), b.to_dense());
        for i in 0..30 {
            for j in 0..30 {
                if i != j {
                    st.push(da[(i, j)], db[(i, j)]);
                }
            }
        }
    }
    assert!((st.density_a() - 0.4).abs() < 0.02);
    assert!((st.corr() - 0.5).abs() < 0.05);
}

#[test]
fn sbm_two_block_parameters() {
    let pref = DMatrix::from_row_slice(2, 2, &[0.7, 0.001, 0.001, 0.5]);
    let (mut w0, mut w1) = (Stats::default(), Stats::default());
    for t in 0..TRIALS {
        let (a, b) = sample_correlated_sbm_pair(&[2, 3], &pref, 0.5, None, &PairOptions::default(), t).unwrap();
        collect(&a, &b, &mut w0, |i, j| i < 2 && j < 2);
        collect(&a, &b, &mut w1, |i, j| i >= 2 && j >= 2);
    }
    assert!((w0.density_a() - 0.7).abs() < 0.05, "{}", w0.density_a());
    assert!((w1.density_a() - 0.5).abs() < 0.05, "{}", w1.density_a());
    assert!((w1.corr() - 0.5).abs() < 0.05, "{}", w1.corr());
}

#[test]
fn sbm_zero_correlation_is_independent() {
    let pref = DMatrix::from_row_slice(2, 2, &[0.4, 0.1, 0.1, 0.3]);
    let mut st = Stats::default();
    for t in 0..TRIALS {
        let (a, b) = sample_correlated_sbm_pair(&[20, 20], &pref, 0.0, None, &PairOptions::default(), t).unwrap();
        collect(&a, &b, &mut st, |i, j| (i < 20) == (j < 20));
    }
    assert!(st.corr().abs() < 0.05);
}

#[test]
fn rdpg_entry_frequencies() {
    let x = DMatrix::from_row_slice(6, 2, &[0.9, 0.1, 0.7, 0.3, 0.5, 0.5, 0.2, 0.6, 0.1, 0.8, 0.6, 0.2]);
    let p = &x * x.transpose();
    let mut counts = DMatrix::<f64>::zeros(6, 6);
    for t in 0..TRIALS {
        let (a, _) = sample_correlated_rdpg_pair(&x, 0.5, &PairOptions::default(), t).unwrap();
        counts += a.to_dense();
    }
    for i in 0..6 {
        for j in i + 1..6 {
            let f = counts[(i, j)] / TRIALS as f64;
            assert!((f - p[(i, j)]).abs() < 0.05, "({i},{j}) {f} vs {}", p[(i, j)]);
        }
    }
}

#[test]
fn constant_ieg_matches_gnp_edge_count_distribution() {
    let (n, p, rho) = (20, 0.3, 0.5);
    let pm = DMatrix::from_element(n, n, p);
    let cm = DMatrix::from_element(n, n, rho);
    let mut x: Vec<f64> = (0..TRIALS)
        .map(|t| sample_correlated_ieg_pair(&pm, &cm, &PairOptions::default(), t).unwrap().1.edge_count() as f64)
        .collect();
    let mut y: Vec<f64> = (0..TRIALS)
        .map(|t| sample_correlated_gnp_pair(&CorrGnpParams::new(n, p, rho), 10_000 + t).unwrap().1.edge_count() as f64)
        .collect();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    // two-sample Kolmogorov–Smirnov statistic
    let cdf = |v: &[f64], t: f64| v.partition_point(|&e| e <= t) as f64 / v.len() as f64;
    let d = x.iter().chain(&y).map(|&t| (cdf(&x, t) - cdf(&y, t)).abs()).fold(0.0, f64::max);
    // critical value at level 0.01 for two samples of 400: 1.63·sqrt(2/400) ≈ 0.115
    assert!(d < 0.115, "KS statistic {d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn feasible_boundary_is_accepted(p in 0.01f64..0.99, seed in 0u64..100) {
        let (lo, hi) = corr_range(p);
        for rho in [lo, hi, (lo + hi) / 2.0] {
            let (a, b) = sample_correlated_gnp_pair(&CorrGnpParams::new(8, p, rho), seed).unwrap();
            prop_assert!(!a.is_directed() && !b.is_directed());
        }
        prop_assert!(sample_correlated_gnp_pair(&CorrGnpParams::new(8, p, lo - 1e-6), seed).is_err());
    }

    #[test]
    fn unit_correlation_is_identity_up_to_relabeling(seed in 0u64..1000, n in 1usize..15) {
        let perm = graphmatch::rng::permutation(n, &mut graphmatch::rng::rng(seed));
        let params = CorrGnpParams {
            options: PairOptions { permutation: Some(perm.clone()), ..PairOptions::default() },
            ..CorrGnpParams::new(n, 0.4, 1.0)
        };
        let (a, b) = sample_correlated_gnp_pair(&params, seed).unwrap();
        prop_assert_eq!(a.edge_count(), b.edge_count());
        for (i, j, _) in a.edges() {
            prop_assert_eq!(b.adjacency().get(perm[i], perm[j]), 1.0);
        }
    }
}
