//! Running density and correlation estimates over aligned sampler output.

use graphmatch::graph::Graph;

/// Running sums for density and Pearson correlation over aligned entries.
#[derive(Default)]
pub struct Stats {
    n: f64,
    sa: f64,
    sb: f64,
    sab: f64,
}

impl Stats {
    pub fn push(&mut self, a: f64, b: f64) {
        self.n += 1.0;
        self.sa += a;
        self.sb += b;
        self.sab += a * b;
    }
    pub fn density_a(&self) -> f64 {
        self.sa / self.n
    }
    pub fn density_b(&self) -> f64 {
        self.sb / self.n
    }
    pub fn corr(&self) -> f64 {
        // binary variables: var = m(1 − m)
        let (ma, mb) = (self.density_a(), self.density_b());
        (self.sab / self.n - ma * mb) / (ma * (1.0 - ma) * mb * (1.0 - mb)).sqrt()
    }
}

/// Adds the aligned upper-triangle entries of `a` and `b` accepted by `keep`.
pub fn collect(a: &Graph, b: &Graph, st: &mut Stats, keep: impl Fn(usize, usize) -> bool) {
    let (da, db) = (a.to_dense(), b.to_dense());
    for i in 0..a.n() {
        for j in i + 1..a.n() {
            if keep(i, j) {
                st.push(da[(i, j)], db[(i, j)]);
            }
        }
    }
}
