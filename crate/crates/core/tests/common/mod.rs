//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

pub mod relax_oracle;
pub mod spectrum;
pub mod stats;

use nalgebra::DMatrix;

/// Every permutation of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Injective maps from `0..k` into `0..n` (k <= n).
pub fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, n: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(k, n, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Exhaustive minimum of `sum_i cost(i, map[i])` over injections, skipping `None` entries.
pub fn brute_force_min(nrows: usize, ncols: usize, cost: impl Fn(usize, usize) -> Option<f64>) -> Option<f64> {
    injections(nrows, ncols)
        .into_iter()
        .filter_map(|m| {
            m.iter()
                .enumerate()
                .map(|(i, &j)| cost(i, j))
                .sum::<Option<f64>>()
        })
        .min_by(|a, b| a.total_cmp(b))
}

/// Textbook O(n³) Hungarian method (potentials + shortest augmenting path on a dense square matrix).
pub fn hungarian_min(c: &DMatrix<f64>) -> (Vec<usize>, f64) {
    let n = c.nrows();
    assert_eq!(n, c.ncols());
    let inf = f64::INFINITY;
    // 1-based arrays, column 0 is the virtual root
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = c[(i0 - 1, j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut mapping = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            mapping[p[j] - 1] = j - 1;
        }
    }
    let obj = mapping.iter().enumerate().map(|(i, &j)| c[(i, j)]).sum();
    (mapping, obj)
}

pub fn is_permutation(m: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    m.len() == n && m.iter().all(|&j| j < n && !std::mem::replace(&mut seen[j], true))
}

/// Central finite difference of `f` at `x` along every entry.
pub fn finite_gradient(f: impl Fn(&DMatrix<f64>) -> f64, x: &DMatrix<f64>, step: f64) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(x.nrows(), x.ncols());
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            let mut plus = x.clone();
            plus[(i, j)] += step;
            let mut minus = x.clone();
            minus[(i, j)] -= step;
            g[(i, j)] = (f(&plus) - f(&minus)) / (2.0 * step);
        }
    }
    g
}

/// Relative error `‖a - b‖_F / max(‖b‖_F, tiny)`.
pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

/// Erdős–Rényi adjacency as a dense 0/1 matrix (optionally directed, no loops).
pub fn random_adjacency(n: usize, p: f64, directed: bool, rng: &mut impl rand::Rng) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            if rng.random::<f64>() < p {
                a[(i, j)] = 1.0;
                if !directed {
                    a[(j, i)] = 1.0;
                }
            }
        }
    }
    a
}

/// Random doubly stochastic matrix: a convex combination of a few random permutations.
pub fn random_ds(n: usize, rng: &mut impl rand::Rng) -> DMatrix<f64> {
    use rand::seq::SliceRandom;
    let mut d = DMatrix::zeros(n, n);
    let weights: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 0.1).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        for (i, &j) in p.iter().enumerate() {
            d[(i, j)] += w / total;
        }
    }
    d
}
