//! Dense reference objectives for the relaxations, and random instances to test them on.

use graphmatch::frame::SeedSet;
use graphmatch::graph::Layers;
use graphmatch::matrix::Matrix;
use graphmatch::relax::{gradient, objective_value, ObjectiveKind, RelaxProblem};
use graphmatch::rng;
use nalgebra::DMatrix;
use rand::Rng;

use super::{finite_gradient, random_adjacency, random_ds, rel_err};

/// Embeds the non-seed block into the full `P = I ⊕ D` in original vertex order.
pub fn embed(n: usize, seeds: &[(usize, usize)], d: &DMatrix<f64>) -> DMatrix<f64> {
    let fa: Vec<usize> = (0..n).filter(|v| !seeds.iter().any(|s| s.0 == *v)).collect();
    let fb: Vec<usize> = (0..n).filter(|v| !seeds.iter().any(|s| s.1 == *v)).collect();
    let mut p = DMatrix::zeros(n, n);
    for &(a, b) in seeds {
        p[(a, b)] = 1.0;
    }
    for (i, &a) in fa.iter().enumerate() {
        for (j, &b) in fb.iter().enumerate() {
            p[(a, b)] = d[(i, j)];
        }
    }
    p
}

fn laplacian(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let deg: Vec<f64> = a.row_iter().map(|r| r.sum()).collect();
    (DMatrix::from_diagonal(&nalgebra::DVector::from_vec(deg.clone())) - a, deg)
}

/// Dense reference objective over the full matrix `P`.
pub fn oracle(kind: ObjectiveKind, a: &[DMatrix<f64>], b: &[DMatrix<f64>], s: Option<&DMatrix<f64>>, p: &DMatrix<f64>) -> f64 {
    let sim = s.map_or(0.0, |s| s.dot(p));
    let convex = || a.iter().zip(b).map(|(a, b)| (a * p - p * b).norm_squared()).sum::<f64>();
    match kind {
        ObjectiveKind::Indefinite => {
            a.iter().zip(b).map(|(a, b)| (a.transpose() * p * b * p.transpose()).trace()).sum::<f64>() + sim
        }
        ObjectiveKind::Convex => convex() - sim,
        ObjectiveKind::Path { lambda } => {
            let (la, da) = laplacian(&a[0]);
            let (lb, db) = laplacian(&b[0]);
            let delta = DMatrix::from_fn(p.nrows(), p.ncols(), |i, j| (da[i] - db[j]).powi(2));
            let f1 = -delta.dot(p) - 2.0 * (la.transpose() * p * lb * p.transpose()).trace();
            (1.0 - lambda) * convex() + lambda * f1 - sim
        }
    }
}

pub struct Instance {
    pub a: Vec<DMatrix<f64>>,
    pub b: Vec<DMatrix<f64>>,
    pub seeds: Vec<(usize, usize)>,
    pub sim: Option<DMatrix<f64>>,
}

pub fn instance(seed: u64, directed: bool, layers: usize, n_seeds: usize, weighted: bool) -> Instance {
    let mut r = rng::rng(seed);
    let n = r.random_range(3..=8).max(n_seeds + 2);
    let make = |r: &mut rng::Rng| {
        let mut m = random_adjacency(n, 0.4, directed, r);
        if weighted {
            let w = DMatrix::from_fn(n, n, |_, _| r.random_range(0.5..2.0));
            let w = if directed { w } else { (&w + w.transpose()) * 0.5 };
            m.component_mul_assign(&w);
        }
        m
    };
    let a: Vec<_> = (0..layers).map(|_| make(&mut r)).collect();
    let b: Vec<_> = (0..layers).map(|_| make(&mut r)).collect();
    let pa = rng::permutation(n, &mut r);
    let pb = rng::permutation(n, &mut r);
    let seeds = (0..n_seeds).map(|k| (pa[k], pb[k])).collect();
    let sim = (seed % 2 == 0).then(|| DMatrix::from_fn(n, n, |_, _| r.random::<f64>()));
    Instance { a, b, seeds, sim }
}

pub fn problem(inst: &Instance, kind: ObjectiveKind) -> RelaxProblem {
    let n = inst.a[0].nrows();
    let la = Layers(inst.a.iter().cloned().map(Matrix::Dense).collect());
    let lb = Layers(inst.b.iter().cloned().map(Matrix::Dense).collect());
    RelaxProblem::new(la, lb, SeedSet::new(inst.seeds.clone(), n, n).unwrap(), inst.sim.clone(), kind).unwrap()
}

/// Relative error of the analytic gradient against central differences at a random interior point.
pub fn check_gradient(inst: &Instance, kind: ObjectiveKind, r: &mut rng::Rng) -> f64 {
    let p = problem(inst, kind);
    let n = inst.a[0].nrows();
    let m = p.n_free();
    let d = random_ds(m, r);
    let f = |x: &DMatrix<f64>| oracle(kind, &inst.a, &inst.b, inst.sim.as_ref(), &embed(n, &inst.seeds, x));
    assert!((objective_value(&p, &d).unwrap() - f(&d)).abs() < 1e-9 * (1.0 + f(&d).abs()));
    rel_err(&gradient(&p, &d).unwrap(), &finite_gradient(f, &d, 1e-6))
}
