//! Shortest augmenting path solver restricted to the stored entries of a sparse cost matrix.
//!
//! Row and column duals keep every stored reduced cost nonnegative, so each augmentation is a
//! Dijkstra search over stored entries only. Work per augmentation is proportional to the
//! number of stored entries reached rather than to `n²`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties toward the smaller column
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimizes over rows `rows[i] = [(col, cost), ..]`; every row must be assigned and
/// `rows.len() <= ncols`.
pub(crate) fn solve(rows: &[Vec<(usize, f64)>], ncols: usize) -> Result<Vec<usize>> {
    let nrows = rows.len();
    if let Some(i) = rows.iter().position(|r| r.is_empty()) {
        return Err(Error::Infeasible(i));
    }
    let mut u: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().map(|e| e.1).fold(f64::INFINITY, f64::min))
        .collect();
    let mut v = vec![0.0; ncols];
    let mut x = vec![NONE; nrows];
    let mut y = vec![NONE; ncols];

    let mut dist = vec![f64::INFINITY; ncols];
    let mut pred = vec![NONE; ncols];
    let mut done = vec![false; ncols];
    let mut touched: Vec<usize> = Vec::new();
    let mut finalized: Vec<usize> = Vec::new();

    for start in 0..nrows {
        for &j in &touched {
            dist[j] = f64::INFINITY;
            pred[j] = NONE;
            done[j] = false;
        }
        touched.clear();
        finalized.clear();
        let mut heap = BinaryHeap::new();
        let relax = |i: usize,
                     base: f64,
                     dist: &mut Vec<f64>,
                     pred: &mut Vec<usize>,
                     touched: &mut Vec<usize>,
                     heap: &mut BinaryHeap<Key>,
                     done: &Vec<bool>,
                     u: &Vec<f64>,
                     v: &Vec<f64>| {
            for &(j, cij) in &rows[i] {
                if done[j] {
                    continue;
                }
                let reduced = (cij - u[i] - v[j]).max(0.0);
                let nd = base + reduced;
                if nd < dist[j] {
                    if dist[j] == f64::INFINITY {
                        touched.push(j);
                    }
                    dist[j] = nd;
                    pred[j] = i;
                    heap.push(Key(nd, j));
                }
            }
        };
        relax(
            start, 0.0, &mut dist, &mut pred, &mut touched, &mut heap, &done, &u, &v,
        );
        let mut sink = NONE;
        while let Some(Key(dj, j)) = heap.pop() {
            if done[j] || dj > dist[j] {
                continue;
            }
            done[j] = true;
            if y[j] == NONE {
                sink = j;
                break;
            }
            finalized.push(j);
            relax(
                y[j], dj, &mut dist, &mut pred, &mut touched, &mut heap, &done, &u, &v,
            );
        }
        if sink == NONE {
            return Err(Error::Infeasible(start));
        }
        let total = dist[sink];
        // dual update: rows reached through a finalized column move by (dist - total)
        u[start] += total;
        for &j in &finalized {
            let delta = total - dist[j];
            v[j] -= delta;
            u[y[j]] += delta;
        }
        // augment along predecessors
        let mut j = sink;
        loop {
            let i = pred[j];
            y[j] = i;
            let prev = x[i];
            x[i] = j;
            if i == start {
                break;
            }
            j = prev;
        }
    }
    Ok(x)
}
