mod common;

use common::*;
use graphmatch::frame::SeedSet;
use graphmatch::graph::Layers;
use graphmatch::matrix::Matrix;
use graphmatch::percolation::*;
use graphmatch::rng;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

/// Reference percolation: recompute every mark from the matched set at each step.
fn naive(a: &[DMatrix<f64>], b: &[DMatrix<f64>], seeds: &[(usize, usize)], sim: Option<&DMatrix<f64>>, r: f64) -> Vec<(usize, usize, f64)> {
    let (na, nb) = (a[0].nrows(), b[0].nrows());
    let mut matched: Vec<(usize, usize)> = seeds.to_vec();
    let mut order = Vec::new();
    loop {
        let used_a: Vec<bool> = (0..na).map(|i| matched.iter().any(|m| m.0 == i)).collect();
        let used_b: Vec<bool> = (0..nb).map(|j| matched.iter().any(|m| m.1 == j)).collect();
        let mut best: Option<(f64, usize, usize)> = None;
        for i in (0..na).filter(|&i| !used_a[i]) {
            for j in (0..nb).filter(|&j| !used_b[j]) {
                let mut m = sim.map_or(0.0, |s| s[(i, j)]);
                for (la, lb) in a.iter().zip(b) {
                    let directed = la != &la.transpose() || lb != &lb.transpose();
                    for &(u, v) in &matched {
                        let mut pair = |x: f64, y: f64| {
                            if let Some(inc) = weighted_mark_increment(x, y) {
                                if x != 0.0 && y != 0.0 {
                                    m += inc;
                                }
                            }
                        };
                        pair(la[(u, i)], lb[(v, j)]);
                        if directed {
                            pair(la[(i, u)], lb[(j, v)]);
                        }
                    }
                }
                if m >= r && best.is_none_or(|b| m > b.0) {
                    best = Some((m, i, j));
                }
            }
        }
        match best {
            Some((m, i, j)) => {
                matched.push((i, j));
                order.push((i, j, m));
            }
            None => return order,
        }
    }
}

fn order_of(m: &graphmatch::frame::MatchResult) -> Vec<(usize, usize, f64)> {
    m.details["match_order"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize, e[2].as_f64().unwrap()))
        .collect()
}

fn layers(ms: &[DMatrix<f64>]) -> Layers {
    Layers(ms.iter().cloned().map(Matrix::Dense).collect())
}

#[test]
fn matches_reference_on_small_graphs() {
    let mut r = rng::rng(21);
    for trial in 0..200 {
        let n = r.random_range(2..=10);
        let nl = 1 + (trial % 3 == 0) as usize;
        let directed = trial % 4 == 1;
        let a: Vec<_> = (0..nl).map(|_| random_adjacency(n, 0.4, directed, &mut r)).collect();
        // B: A under a random relabeling with a few edges flipped
        let pi = rng::permutation(n, &mut r);
        let b: Vec<_> = a
            .iter()
            .map(|la| {
                let mut lb = DMatrix::from_fn(n, n, |i, j| la[(pi.iter().position(|&x| x == i).unwrap(), pi.iter().position(|&x| x == j).unwrap())]);
                let (u, v) = (r.random_range(0..n), r.random_range(0..n));
                if u != v {
                    lb[(u, v)] = 1.0 - lb[(u, v)];
                    if !directed {
                        lb[(v, u)] = lb[(u, v)];
                    }
                }
                lb
            })
            .collect();
        let ns = r.random_range(1..=n.min(3));
        let seeds: Vec<_> = (0..ns).map(|k| (k, pi[k])).collect();
        let thr = if trial % 2 == 0 { 1.0 } else { 2.0 };
        let sim = (trial % 5 == 0).then(|| DMatrix::from_fn(n, n, |_, _| r.random_range(0..3) as f64 * 0.5));
        let got = gm_percolation(layers(&a), layers(&b), &SeedSet::new(seeds.clone(), n, n).unwrap(), sim.as_ref(), thr).unwrap();
        let expected = naive(&a, &b, &seeds, sim.as_ref(), thr);
        assert_eq!(order_of(&got), expected, "trial {trial}");
    }
}

#[test]
fn multilayer_marks_are_sums_of_layer_marks() {
    let mut r = rng::rng(4);
    let n = 8;
    let a: Vec<_> = (0..3).map(|_| random_adjacency(n, 0.5, false, &mut r)).collect();
    let seeds = vec![(0, 0), (1, 1)];
    let set = SeedSet::new(seeds.clone(), n, n).unwrap();
    let combined = gm_percolation(layers(&a), layers(&a), &set, None, 1.0).unwrap();
    assert_eq!(order_of(&combined), naive(&a, &a, &seeds, None, 1.0));
}

#[test]
fn weighted_graphs_follow_the_update_formula() {
    let mut r = rng::rng(9);
    for trial in 0..50 {
        let n = r.random_range(3..=8);
        let w = |r: &mut rng::Rng| {
            let m = random_adjacency(n, 0.5, false, r);
            let wts = DMatrix::from_fn(n, n, |_, _| r.random_range(1..4) as f64);
            let wts = &wts + wts.transpose();
            m.component_mul(&wts)
        };
        let a = vec![w(&mut r)];
        let b = vec![w(&mut r)];
        let seeds = vec![(0, 0)];
        let got = gm_percolation(layers(&a), layers(&b), &SeedSet::new(seeds.clone(), n, n).unwrap(), None, 0.5).unwrap();
        let exp = naive(&a, &b, &seeds, None, 0.5);
        let g = order_of(&got);
        assert_eq!(g.len(), exp.len(), "trial {trial}");
        for (x, y) in g.iter().zip(&exp) {
            assert_eq!((x.0, x.1), (y.0, y.1), "trial {trial}");
            assert!((x.2 - y.2).abs() < 1e-12);
        }
    }
}

#[test]
fn expand_is_never_worse_and_equal_when_not_stuck() {
    let mut r = rng::rng(12);
    for _ in 0..100 {
        let n = r.random_range(4..=12);
        let a = random_adjacency(n, 0.35, false, &mut r);
        let seeds = SeedSet::new(vec![(0, 0)], n, n).unwrap();
        let p = gm_percolation(a.clone(), a.clone(), &seeds, None, 2.0).unwrap();
        let e = gm_expand_when_stuck(a.clone(), a.clone(), &seeds, None, 2.0).unwrap();
        assert!(e.len() >= p.len());
        if p.len() == n {
            assert_eq!(p.corr(), e.corr());
        }
        let p1 = gm_percolation(a.clone(), a.clone(), &seeds, None, 1.0).unwrap();
        if p1.len() == n {
            let e1 = gm_expand_when_stuck(a.clone(), a.clone(), &seeds, None, 1.0).unwrap();
            assert_eq!(p1.corr(), e1.corr());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_respects_threshold_and_injectivity(seed in 0u64..10_000, thr in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let mut r = rng::rng(seed);
        let n = r.random_range(3..=12);
        let a = random_adjacency(n, 0.4, seed % 2 == 0, &mut r);
        let b = random_adjacency(n, 0.4, seed % 2 == 0, &mut r);
        let seeds = SeedSet::new(vec![(0, 1), (2, 0)], n, n).unwrap();
        for m in [
            gm_percolation(a.clone(), b.clone(), &seeds, None, thr).unwrap(),
            gm_expand_when_stuck(a.clone(), b.clone(), &seeds, None, thr).unwrap(),
        ] {
            let order = order_of(&m);
            for e in &order {
                prop_assert!(e.2 >= thr);
            }
            let mut expected: Vec<_> = seeds.pairs().to_vec();
            expected.extend(order.iter().map(|e| (e.0, e.1)));
            expected.sort_unstable();
            prop_assert_eq!(m.corr(), expected.as_slice());
        }
    }
}
