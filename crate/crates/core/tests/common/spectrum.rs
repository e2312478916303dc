//! Direct complex eigendecomposition of the Hermitian form of a digraph.

use nalgebra::{Complex, DMatrix, SymmetricEigen};

pub fn hermitian(a: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| {
        Complex::new((a[(i, j)] + a[(j, i)]) / 2.0, (a[(i, j)] - a[(j, i)]) / 2.0)
    })
}

/// `|U|` from a direct complex eigensolver, columns by descending eigenvalue, plus the spectrum.
pub fn oracle_abs_u(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(hermitian(a));
    let mut idx: Vec<usize> = (0..a.nrows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let u = DMatrix::from_fn(a.nrows(), a.nrows(), |i, k| eig.eigenvectors[(i, idx[k])].norm());
    (vals, u)
}

/// Simple spectrum and pairwise-distinct rows of `|U|`, so the match is unique.
pub fn well_separated(a: &DMatrix<f64>) -> bool {
    let (vals, u) = oracle_abs_u(a);
    let gaps = vals.windows(2).all(|w| w[0] - w[1] > 1e-3);
    let rows = (0..u.nrows()).all(|i| (0..i).all(|k| (u.row(i) - u.row(k)).norm() > 1e-3));
    gaps && rows
}
