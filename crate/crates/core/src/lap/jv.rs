//! Jonker-Volgenant shortest augmenting path solver for dense square cost matrices.
//!
//! Column reduction, two rounds of augmenting row reduction, then Dijkstra-style
//! augmentation for the rows still free. Minimizes; callers negate for maximization.

use nalgebra::DMatrix;

const NONE: usize = usize::MAX;

/// Returns `x` with `x[i]` the column assigned to row `i`.
pub(crate) fn solve(cost: &DMatrix<f64>) -> Vec<usize> {
    let n = cost.nrows();
    debug_assert_eq!(n, cost.ncols());
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![0];
    }
    let c = |i: usize, j: usize| cost[(i, j)];
    let mut x = vec![NONE; n];
    let mut y = vec![NONE; n];
    let mut v = vec![0.0; n];
    let mut free = column_reduction(n, &c, &mut x, &mut y, &mut v);
    let mut rounds = 0;
    while !free.is_empty() && rounds < 2 {
        free = augmenting_row_reduction(n, &c, free, &mut x, &mut y, &mut v);
        rounds += 1;
    }
    if !free.is_empty() {
        augment(n, &c, &free, &mut x, &mut y, &mut v);
    }
    x
}

fn column_reduction(
    n: usize,
    c: &impl Fn(usize, usize) -> f64,
    x: &mut [usize],
    y: &mut [usize],
    v: &mut [f64],
) -> Vec<usize> {
    for j in 0..n {
        v[j] = f64::INFINITY;
        y[j] = 0;
    }
    for i in 0..n {
        for j in 0..n {
            let cij = c(i, j);
            if cij < v[j] {
                v[j] = cij;
                y[j] = i;
            }
        }
    }
    let mut unique = vec![true; n];
    for j in (0..n).rev() {
        let i = y[j];
        if x[i] == NONE {
            x[i] = j;
        } else {
            unique[i] = false;
            y[j] = NONE;
        }
    }
    let mut free = Vec::new();
    for i in 0..n {
        if x[i] == NONE {
            free.push(i);
        } else if unique[i] {
            // reduction transfer
            let j = x[i];
            let mut min = f64::INFINITY;
            for j2 in 0..n {
                if j2 != j {
                    let r = c(i, j2) - v[j2];
                    if r < min {
                        min = r;
                    }
                }
            }
            v[j] -= min;
        }
    }
    free
}

fn augmenting_row_reduction(
    n: usize,
    c: &impl Fn(usize, usize) -> f64,
    mut free: Vec<usize>,
    x: &mut [usize],
    y: &mut [usize],
    v: &mut [f64],
) -> Vec<usize> {
    let n_free = free.len();
    let mut current = 0usize;
    let mut new_free = 0usize;
    let mut rr_cnt = 0usize;
    while current < n_free {
        rr_cnt += 1;
        let free_i = free[current];
        current += 1;
        let mut j1 = 0usize;
        let mut v1 = c(free_i, 0) - v[0];
        let mut j2 = NONE;
        let mut v2 = f64::INFINITY;
        for j in 1..n {
            let r = c(free_i, j) - v[j];
            if r < v2 {
                if r >= v1 {
                    v2 = r;
                    j2 = j;
                } else {
                    v2 = v1;
                    v1 = r;
                    j2 = j1;
                    j1 = j;
                }
            }
        }
        let mut i0 = y[j1];
        let v1_new = v[j1] - (v2 - v1);
        let v1_lowers = v1_new < v[j1];
        if rr_cnt < current * n {
            if v1_lowers {
                v[j1] = v1_new;
            } else if i0 != NONE && j2 != NONE {
                j1 = j2;
                i0 = y[j2];
            }
            if i0 != NONE {
                if v1_lowers {
                    current -= 1;
                    free[current] = i0;
                } else {
                    free[new_free] = i0;
                    new_free += 1;
                }
            }
        } else if i0 != NONE {
            free[new_free] = i0;
            new_free += 1;
        }
        x[free_i] = j1;
        y[j1] = free_i;
    }
    free.truncate(new_free);
    free
}

fn augment(
    n: usize,
    c: &impl Fn(usize, usize) -> f64,
    free: &[usize],
    x: &mut [usize],
    y: &mut [usize],
    v: &mut [f64],
) {
    let mut pred = vec![0usize; n];
    let mut d = vec![0.0; n];
    let mut cols: Vec<usize> = vec![0; n];
    for &free_i in free {
        let end = find_path(n, c, free_i, y, v, &mut pred, &mut d, &mut cols);
        let mut j = end;
        loop {
            let i = pred[j];
            y[j] = i;
            std::mem::swap(&mut j, &mut x[i]);
            if i == free_i {
                break;
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn find_path(
    n: usize,
    c: &impl Fn(usize, usize) -> f64,
    start: usize,
    y: &[usize],
    v: &mut [f64],
    pred: &mut [usize],
    d: &mut [f64],
    cols: &mut [usize],
) -> usize {
    for (j, col) in cols.iter_mut().enumerate() {
        *col = j;
    }
    for j in 0..n {
        d[j] = c(start, j) - v[j];
        pred[j] = start;
    }
    let mut lo = 0usize;
    let mut hi = 0usize;
    let mut n_ready = 0usize;
    let mut final_j = NONE;
    while final_j == NONE {
        if lo == hi {
            n_ready = lo;
            hi = find_minimum(n, lo, d, cols);
            for &j in &cols[lo..hi] {
                if y[j] == NONE {
                    final_j = j;
                }
            }
        }
        if final_j == NONE {
            final_j = scan(n, c, &mut lo, &mut hi, d, cols, pred, y, v);
        }
    }
    let mind = d[cols[lo]];
    for &j in &cols[..n_ready] {
        v[j] += d[j] - mind;
    }
    final_j
}

/// Moves the columns with minimal `d` among `cols[lo..]` to the front; returns the new `hi`.
// `hi` grows inside the loop on purpose; the scanned range is fixed at entry
#[allow(clippy::mut_range_bound)]
fn find_minimum(n: usize, lo: usize, d: &[f64], cols: &mut [usize]) -> usize {
    let mut hi = lo + 1;
    let mut mind = d[cols[lo]];
    for k in hi..n {
        let j = cols[k];
        if d[j] <= mind {
            if d[j] < mind {
                hi = lo;
                mind = d[j];
            }
            cols[k] = cols[hi];
            cols[hi] = j;
            hi += 1;
        }
    }
    hi
}

#[allow(clippy::too_many_arguments, clippy::mut_range_bound)]
fn scan(
    n: usize,
    c: &impl Fn(usize, usize) -> f64,
    plo: &mut usize,
    phi: &mut usize,
    d: &mut [f64],
    cols: &mut [usize],
    pred: &mut [usize],
    y: &[usize],
    v: &[f64],
) -> usize {
    let mut lo = *plo;
    let mut hi = *phi;
    while lo != hi {
        let j = cols[lo];
        lo += 1;
        let i = y[j];
        let mind = d[j];
        let h = c(i, j) - v[j] - mind;
        for k in hi..n {
            let j = cols[k];
            let cred = c(i, j) - v[j] - h;
            if cred < d[j] {
                d[j] = cred;
                pred[j] = i;
                if cred == mind {
                    if y[j] == NONE {
                        return j;
                    }
                    cols[k] = cols[hi];
                    cols[hi] = j;
                    hi += 1;
                }
            }
        }
    }
    *plo = lo;
    *phi = hi;
    NONE
}
