//! Compressed-sparse-row complex matrices.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::scalar::Real;

/// Rows above this length use a parallel matrix-vector product.
const PARALLEL_ROWS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T: Real> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, Complex::new(T::one(), T::zero()))
    }

    pub fn scaled_identity(n: usize, c: Complex<T>) -> Self {
        if c.is_zero() {
            return Self::zeros(n, n);
        }
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![c; n],
        }
    }

    /// Duplicates are summed; entries that sum to exactly zero are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, Complex<T>)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex<T>> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(values) {
            if !v.is_zero() {
                indptr[r + 1] += 1;
                keep_idx.push(c);
                keep_val.push(v);
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn from_dense(m: &DMatrix<Complex<T>>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if !v.is_zero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
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

    /// `(column, value)` pairs of one row.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let span = self.indptr[i]..self.indptr[i + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.row(i).find(|&(c, _)| c == j).map(|(_, v)| v).unwrap_or_else(Complex::zero)
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(i, j, v)| (j, i, v)).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect(),
        )
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        if c.is_zero() {
            return Self::zeros(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(self.nrows, self.ncols, self.triplets().chain(other.triplets()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Complex::new(T::one(), T::zero())))
    }

    /// Sum of several matrices of equal shape.
    pub fn sum<'a>(nrows: usize, ncols: usize, parts: impl IntoIterator<Item = &'a Self>) -> Self
    where
        T: 'a,
    {
        let mut t = Vec::new();
        for p in parts {
            assert_eq!((p.nrows, p.ncols), (nrows, ncols));
            t.extend(p.triplets());
        }
        Self::from_triplets(nrows, ncols, t)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut t = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    t.push((i, j, a * b));
                }
            }
        }
        Self::from_triplets(self.nrows, other.ncols, t)
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                t.push((i * other.nrows + k, j * other.ncols + l, a * b));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, t)
    }

    pub fn mul_vec(&self, x: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        assert_eq!(x.len(), self.ncols);
        let mut y = DVector::zeros(self.nrows);
        let row_dot = |i: usize| self.row(i).fold(Complex::zero(), |acc, (j, a)| acc + a * x[j]);
        if self.nrows >= PARALLEL_ROWS {
            y.as_mut_slice()
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, yi)| *yi = row_dot(i));
        } else {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi = row_dot(i);
            }
        }
        y
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> T {
        let mut cols = vec![T::zero(); self.ncols];
        for (_, j, v) in self.triplets() {
            cols[j] += v.modulus();
        }
        cols.into_iter().fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.modulus()))
    }

    /// Dense sub-block with the given rows and columns.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<Complex<T>> {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (p, &c) in cols.iter().enumerate() {
            col_pos[c] = p;
        }
        let mut out = DMatrix::zeros(rows.len(), cols.len());
        for (p, &r) in rows.iter().enumerate() {
            for (j, v) in self.row(r) {
                if col_pos[j] != usize::MAX {
                    out[(p, col_pos[j])] = v;
                }
            }
        }
        out
    }

    /// Sparse principal sub-matrix on `keep`, in the order given.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.ncols.max(self.nrows)];
        for (p, &k) in keep.iter().enumerate() {
            pos[k] = p;
        }
        let mut t = Vec::new();
        for (p, &r) in keep.iter().enumerate() {
            for (j, v) in self.row(r) {
                if pos[j] != usize::MAX {
                    t.push((p, pos[j], v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), t)
    }
}
