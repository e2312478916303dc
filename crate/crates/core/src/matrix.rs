//! Matrix storage used by the matching algorithms.
//!
//! Three representations share one operand type, [`Matrix`]:
//!
//! * [`CsrMatrix`]: compressed sparse rows, the natural form of an adjacency matrix.
//! * [`SplrMatrix`]: a sparse part plus a thin outer product `S + L·Rᵀ`. Centered graphs
//!   (`2A - J`) and rank-reduced graphs live here without ever materializing `n²` entries.
//! * dense `nalgebra` matrices, for small inputs or anything already dense.
//!
//! Algorithms only need a handful of products (`M·X`, `Mᵀ·X`, `X·M`), sub-blocks and
//! padding, so that is what [`Matrix`] offers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate coordinates are summed
    /// and explicit zeros are kept out of the structure.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut trips: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= nrows {
                return Err(Error::VertexOutOfRange { vertex: r, n: nrows });
            }
            if c >= ncols {
                return Err(Error::VertexOutOfRange { vertex: c, n: ncols });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: r,
                    col: c,
                    value: v,
                });
            }
            trips.push((r, c, v));
        }
        trips.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(trips.len());
        let mut values: Vec<f64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(trips.len());
        for (r, c, v) in trips {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, c));
            rows.push(r);
            indices.push(c);
            values.push(v);
        }
        // drop entries that cancelled to zero
        let mut keep_rows = Vec::with_capacity(rows.len());
        let mut keep_idx = Vec::with_capacity(rows.len());
        let mut keep_val = Vec::with_capacity(rows.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if v != 0.0 {
                keep_rows.push(r);
                keep_idx.push(c);
                keep_val.push(v);
            }
        }
        for &r in &keep_rows {
            indptr[r + 1] += 1;
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        })
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut indptr = Vec::with_capacity(m.nrows() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            nrows: m.nrows(),
            ncols: m.ncols(),
            indptr,
            indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Iterates stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for (i, j, v) in self.iter() {
            let slot = next[j];
            indices[slot] = i;
            values[slot] = v;
            next[j] += 1;
        }
        CsrMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            indptr: counts,
            indices,
            values,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    /// `self · x`
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.ncols, x.nrows(), "csr · dense dimension mismatch");
        let k = x.ncols();
        let mut out = DMatrix::zeros(self.nrows, k);
        for c in 0..k {
            let xc = x.column(c);
            for i in 0..self.nrows {
                let (cols, vals) = self.row(i);
                let mut acc = 0.0;
                for (&j, &v) in cols.iter().zip(vals) {
                    acc += v * xc[j];
                }
                out[(i, c)] = acc;
            }
        }
        out
    }

    /// `selfᵀ · x`
    pub fn tr_mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.nrows, x.nrows(), "csrᵀ · dense dimension mismatch");
        let k = x.ncols();
        let mut out = DMatrix::zeros(self.ncols, k);
        for c in 0..k {
            for i in 0..self.nrows {
                let xi = x[(i, c)];
                if xi == 0.0 {
                    continue;
                }
                let (cols, vals) = self.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    out[(j, c)] += v * xi;
                }
            }
        }
        out
    }

    /// Extracts the block with the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (p, &c) in cols.iter().enumerate() {
            col_pos[c] = p;
        }
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for &r in rows {
            let (cs, vs) = self.row(r);
            let mut entries: Vec<(usize, f64)> = cs
                .iter()
                .zip(vs)
                .filter_map(|(&c, &v)| {
                    let p = col_pos[c];
                    (p != usize::MAX).then_some((p, v))
                })
                .collect();
            entries.sort_by_key(|e| e.0);
            for (p, v) in entries {
                indices.push(p);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            nrows: rows.len(),
            ncols: cols.len(),
            indptr,
            indices,
            values,
        }
    }

    /// Embeds the matrix in the top-left corner of a larger zero matrix.
    pub fn padded(&self, nrows: usize, ncols: usize) -> CsrMatrix {
        assert!(nrows >= self.nrows && ncols >= self.ncols);
        let mut indptr = self.indptr.clone();
        indptr.resize(nrows + 1, self.nnz());
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices: self.indices.clone(),
            values: self.values.clone(),
        }
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> CsrMatrix {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = f(*v);
        }
        out
    }

    /// Divides every column by its sum; zero columns stay zero.
    pub fn column_normalized(&self) -> CsrMatrix {
        let mut sums = vec![0.0; self.ncols];
        for (_, j, v) in self.iter() {
            sums[j] += v;
        }
        let mut out = self.clone();
        for k in 0..out.values.len() {
            let s = sums[out.indices[k]];
            if s != 0.0 {
                out.values[k] /= s;
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols && self.transpose() == *self
    }
}

/// Sparse plus low-rank matrix `sparse + left · rightᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplrMatrix {
    pub sparse: CsrMatrix,
    pub left: DMatrix<f64>,
    pub right: DMatrix<f64>,
}

impl SplrMatrix {
    pub fn new(sparse: CsrMatrix, left: DMatrix<f64>, right: DMatrix<f64>) -> Result<Self> {
        if left.nrows() != sparse.nrows()
            || right.nrows() != sparse.ncols()
            || left.ncols() != right.ncols()
        {
            return Err(Error::Dimension(format!(
                "splr parts {}x{} + ({}x{})({}x{})ᵀ",
                sparse.nrows(),
                sparse.ncols(),
                left.nrows(),
                left.ncols(),
                right.nrows(),
                right.ncols()
            )));
        }
        Ok(SplrMatrix {
            sparse,
            left,
            right,
        })
    }

    pub fn nrows(&self) -> usize {
        self.sparse.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.sparse.ncols()
    }

    pub fn rank(&self) -> usize {
        self.left.ncols()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.sparse.to_dense() + &self.left * self.right.transpose()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sparse.get(i, j) + self.left.row(i).dot(&self.right.row(j))
    }

    /// `(S + L Rᵀ) · x` without forming the dense matrix.
    pub fn mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.sparse.mul_dense(x) + &self.left * (self.right.transpose() * x)
    }

    /// `(S + L Rᵀ)ᵀ · x`
    pub fn tr_mul_dense(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.sparse.tr_mul_dense(x) + &self.right * (self.left.transpose() * x)
    }

    pub fn transpose(&self) -> SplrMatrix {
        SplrMatrix {
            sparse: self.sparse.transpose(),
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SplrMatrix {
        SplrMatrix {
            sparse: self.sparse.submatrix(rows, cols),
            left: self.left.select_rows(rows),
            right: self.right.select_rows(cols),
        }
    }

    pub fn padded(&self, nrows: usize, ncols: usize) -> SplrMatrix {
        let mut left = DMatrix::zeros(nrows, self.rank());
        left.view_mut((0, 0), (self.nrows(), self.rank()))
            .copy_from(&self.left);
        let mut right = DMatrix::zeros(ncols, self.rank());
        right
            .view_mut((0, 0), (self.ncols(), self.rank()))
            .copy_from(&self.right);
        SplrMatrix {
            sparse: self.sparse.padded(nrows, ncols),
            left,
            right,
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        let cross: f64 = self
            .sparse
            .iter()
            .map(|(i, j, v)| v * self.left.row(i).dot(&self.right.row(j)))
            .sum();
        let low = (self.left.transpose() * &self.left).dot(&(self.right.transpose() * &self.right));
        self.sparse.frobenius_sq() + 2.0 * cross + low
    }
}

/// A matrix operand accepted by every matching algorithm.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Sparse(CsrMatrix),
    Splr(SplrMatrix),
    Dense(DMatrix<f64>),
}

impl From<CsrMatrix> for Matrix {
    fn from(m: CsrMatrix) -> Self {
        Matrix::Sparse(m)
    }
}

impl From<SplrMatrix> for Matrix {
    fn from(m: SplrMatrix) -> Self {
        Matrix::Splr(m)
    }
}

impl From<DMatrix<f64>> for Matrix {
    fn from(m: DMatrix<f64>) -> Self {
        Matrix::Dense(m)
    }
}

impl Matrix {
    pub fn nrows(&self) -> usize {
        match self {
            Matrix::Sparse(m) => m.nrows(),
            Matrix::Splr(m) => m.nrows(),
            Matrix::Dense(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            Matrix::Sparse(m) => m.ncols(),
            Matrix::Splr(m) => m.ncols(),
            Matrix::Dense(m) => m.ncols(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Matrix::Sparse(m) => m.to_dense(),
            Matrix::Splr(m) => m.to_dense(),
            Matrix::Dense(m) => m.clone(),
        }
    }

    /// Entry `(i, j)`; `O(rank)` for the structured forms.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Matrix::Sparse(m) => m.get(i, j),
            Matrix::Splr(m) => m.get(i, j),
            Matrix::Dense(m) => m[(i, j)],
        }
    }

    /// `self · x`
    pub fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Matrix::Sparse(m) => m.mul_dense(x),
            Matrix::Splr(m) => m.mul_dense(x),
            Matrix::Dense(m) => m * x,
        }
    }

    /// `selfᵀ · x`
    pub fn tr_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Matrix::Sparse(m) => m.tr_mul_dense(x),
            Matrix::Splr(m) => m.tr_mul_dense(x),
            Matrix::Dense(m) => m.tr_mul(x),
        }
    }

    /// `x · self`
    pub fn left_mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Matrix::Dense(m) => x * m,
            _ => self.tr_mul(&x.transpose()).transpose(),
        }
    }

    /// `x · selfᵀ`
    pub fn left_mul_tr(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Matrix::Dense(m) => x * m.transpose(),
            _ => self.mul(&x.transpose()).transpose(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        match self {
            Matrix::Sparse(m) => Matrix::Sparse(m.transpose()),
            Matrix::Splr(m) => Matrix::Splr(m.transpose()),
            Matrix::Dense(m) => Matrix::Dense(m.transpose()),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        match self {
            Matrix::Sparse(m) => Matrix::Sparse(m.submatrix(rows, cols)),
            Matrix::Splr(m) => Matrix::Splr(m.submatrix(rows, cols)),
            Matrix::Dense(m) => Matrix::Dense(m.select_rows(rows).select_columns(cols)),
        }
    }

    /// Zero-pads to `n × n`.
    pub fn padded(&self, n: usize) -> Matrix {
        assert!(n >= self.nrows() && n >= self.ncols());
        match self {
            Matrix::Sparse(m) => Matrix::Sparse(m.padded(n, n)),
            Matrix::Splr(m) => Matrix::Splr(m.padded(n, n)),
            Matrix::Dense(m) => {
                let mut out = DMatrix::zeros(n, n);
                out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
                Matrix::Dense(out)
            }
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        match self {
            Matrix::Sparse(m) => m.frobenius_sq(),
            Matrix::Splr(m) => m.frobenius_sq(),
            Matrix::Dense(m) => m.norm_squared(),
        }
    }

    /// Row `i` as a dense vector.
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        match self {
            Matrix::Sparse(m) => {
                let mut out = vec![0.0; m.ncols()];
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    out[j] = v;
                }
                out
            }
            Matrix::Splr(m) => (0..m.ncols()).map(|j| m.get(i, j)).collect(),
            Matrix::Dense(m) => m.row(i).iter().copied().collect(),
        }
    }

    /// Stored nonzero entries, as a sparse matrix. Structured forms are materialized.
    pub fn to_csr(&self) -> CsrMatrix {
        match self {
            Matrix::Sparse(m) => m.clone(),
            _ => CsrMatrix::from_dense(&self.to_dense()),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.nrows() != self.ncols() {
            return false;
        }
        match self {
            Matrix::Sparse(m) => m.is_symmetric(),
            _ => {
                let d = self.to_dense();
                (&d - d.transpose()).amax() <= tol
            }
        }
    }

    /// Fraction of stored (nonzero) entries.
    pub fn density(&self) -> f64 {
        let total = (self.nrows() * self.ncols()).max(1) as f64;
        match self {
            Matrix::Sparse(m) => m.nnz() as f64 / total,
            _ => self.to_dense().iter().filter(|v| **v != 0.0).count() as f64 / total,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(3, 4, vec![(0, 1, 2.0), (2, 3, -1.0), (1, 0, 4.0), (0, 1, 1.0)])
            .unwrap()
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = sample();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 4.0);
        assert_eq!(m.get(2, 2), 0.0);
    }

    #[test]
    fn triplets_reject_out_of_range() {
        assert!(CsrMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
        assert!(CsrMatrix::from_triplets(2, 2, vec![(0, 0, f64::NAN)]).is_err());
    }

    #[test]
    fn transpose_and_products_agree_with_dense() {
        let m = sample();
        let d = m.to_dense();
        assert_eq!(m.transpose().to_dense(), d.transpose());
        let x = DMatrix::from_fn(4, 2, |i, j| (i * 2 + j) as f64 - 1.5);
        assert_eq!(m.mul_dense(&x), &d * &x);
        let y = DMatrix::from_fn(3, 2, |i, j| (i + j) as f64 * 0.5);
        assert_eq!(m.tr_mul_dense(&y), d.transpose() * &y);
    }

    #[test]
    fn submatrix_reorders() {
        let m = sample();
        let s = m.submatrix(&[2, 0], &[3, 1]);
        assert_eq!(s.to_dense(), DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 3.0]));
    }

    #[test]
    fn splr_matches_dense() {
        let s = sample();
        let l = DMatrix::from_fn(3, 2, |i, j| 0.1 * (i + j + 1) as f64);
        let r = DMatrix::from_fn(4, 2, |i, j| 0.3 * i as f64 - 0.2 * j as f64);
        let m = SplrMatrix::new(s, l, r).unwrap();
        let d = m.to_dense();
        let x = DMatrix::from_fn(4, 3, |i, j| (i as f64 - j as f64).sin());
        assert!((m.mul_dense(&x) - &d * &x).amax() < 1e-12);
        let y = DMatrix::from_fn(3, 3, |i, j| (i as f64 + 2.0 * j as f64).cos());
        assert!((m.tr_mul_dense(&y) - d.transpose() * &y).amax() < 1e-12);
        assert!((m.frobenius_sq() - d.norm_squared()).abs() < 1e-12);
        let sub = m.submatrix(&[1, 2], &[0, 3]);
        assert!((sub.to_dense() - d.select_rows(&[1, 2]).select_columns(&[0, 3])).amax() < 1e-15);
        let p = m.padded(5, 6).to_dense();
        assert_eq!(p.nrows(), 5);
        assert!((p.view((0, 0), (3, 4)) - &d).amax() < 1e-15);
        assert_eq!(p.row(4).amax(), 0.0);
    }

    #[test]
    fn column_normalization_leaves_zero_columns() {
        let m = CsrMatrix::from_triplets(3, 3, vec![(0, 1, 1.0), (2, 1, 3.0)]).unwrap();
        let n = m.column_normalized();
        assert_eq!(n.get(0, 1), 0.25);
        assert_eq!(n.get(2, 1), 0.75);
        assert_eq!(n.row_sums(), vec![0.25, 0.0, 0.75]);
    }
}
