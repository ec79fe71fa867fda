//! Minimal CSR sparse matrices.
//!
//! The Hodge-system matrices are assembled and multiplied here; anything
//! dense (SVD, eigensolves) goes through `nalgebra::DMatrix`.

use nalgebra::DMatrix;
use num_traits::Zero;
use std::ops::{AddAssign, Mul, Neg};

/// Compressed sparse row matrix over a numeric scalar (`f64` or `i64` here).
#[derive(Debug, Clone, PartialEq)]
pub struct Csr<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Copy + Zero + PartialEq + AddAssign> Csr<T> {
    /// Build from (row, col, value) triplets; duplicates are summed, zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet out of bounds");
            rows[r].push((c, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for &(c, v) in row.iter() {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            // drop explicit zeros created by cancellation
            let start = indptr[indptr.len() - 1];
            let mut w = start;
            for k in start..values.len() {
                if values[k] != T::zero() {
                    values[w] = values[k];
                    indices[w] = indices[k];
                    w += 1;
                }
            }
            values.truncate(w);
            indices.truncate(w);
            indptr.push(w);
        }
        Csr { nrows, ncols, indptr, indices, values }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csr { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
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

    /// (column, value) pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[a..b].iter().copied().zip(self.values[a..b].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.indptr[r + 1] - self.indptr[r]
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.nrows).map(|r| self.row_nnz(r)).max().unwrap_or(0)
    }

    /// Iterate all stored entries as (row, col, value).
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<(usize, usize, T)> = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        Csr::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn map<U, F>(&self, f: F) -> Csr<U>
    where
        U: Copy + Zero + PartialEq + AddAssign,
        F: Fn(usize, usize, T) -> U,
    {
        let t: Vec<(usize, usize, U)> = self.triplets().map(|(r, c, v)| (r, c, f(r, c, v))).collect();
        Csr::from_triplets(self.nrows, self.ncols, &t)
    }
}

impl<T> Csr<T>
where
    T: Copy + Zero + PartialEq + AddAssign + Mul<Output = T>,
{
    /// Sparse-sparse product `self * other`.
    pub fn matmul(&self, other: &Csr<T>) -> Csr<T> {
        assert_eq!(self.ncols, other.nrows, "matmul dimension mismatch");
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            let mut acc: Vec<(usize, T)> = Vec::new();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    acc.push((c, a * b));
                }
            }
            acc.sort_by_key(|&(c, _)| c);
            let mut it = acc.into_iter();
            if let Some((mut cur_c, mut cur_v)) = it.next() {
                for (c, v) in it {
                    if c == cur_c {
                        cur_v += v;
                    } else {
                        triplets.push((r, cur_c, cur_v));
                        cur_c = c;
                        cur_v = v;
                    }
                }
                triplets.push((r, cur_c, cur_v));
            }
        }
        Csr::from_triplets(self.nrows, other.ncols, &triplets)
    }

    /// Scale row i by d[i].
    pub fn scale_rows(&self, d: &[T]) -> Csr<T> {
        assert_eq!(d.len(), self.nrows);
        self.map(|r, _, v| d[r] * v)
    }

    /// Scale column j by d[j].
    pub fn scale_cols(&self, d: &[T]) -> Csr<T> {
        assert_eq!(d.len(), self.ncols);
        self.map(|_, c, v| v * d[c])
    }
}

impl<T: Copy + Zero + PartialEq + AddAssign + Neg<Output = T>> Csr<T> {
    pub fn neg(&self) -> Csr<T> {
        self.map(|_, _, v| -v)
    }
}

impl Csr<i64> {
    pub fn to_f64(&self) -> Csr<f64> {
        self.map(|_, _, v| v as f64)
    }
}

impl Csr<f64> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut s = 0.0;
            for (c, v) in self.row(r) {
                s += v * x[c];
            }
            y[r] = s;
        }
    }

    /// y = A^T x without materializing the transpose.
    pub fn matvec_transpose(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                y[c] += v * x[r];
            }
        }
    }

    /// Dense product A * B for wide right-hand sides.
    pub fn mul_dense(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(self.ncols, b.nrows());
        let mut out = DMatrix::zeros(self.nrows, b.ncols());
        for r in 0..self.nrows {
            for (k, v) in self.row(r) {
                for j in 0..b.ncols() {
                    out[(r, j)] += v * b[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
