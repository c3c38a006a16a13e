use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;

use super::expm::expm_action;
use super::sparse::SparseMatrix;
use super::state::DensityMatrix;
use super::{bilinear_form, mode_operators, FockCutoff};
use crate::algebra::{GeneratorKind, SuperOpExpr};
use crate::error::{ensure_dim, Result};
use crate::scalar::{lit, real, Real};

/// Superoperator as a sparse matrix on row-major vectorized density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOpMatrix<T: Real> {
    cutoff: FockCutoff,
    matrix: SparseMatrix<T>,
}

impl<T: Real> SuperOpMatrix<T> {
    pub fn from_sparse(cutoff: FockCutoff, matrix: SparseMatrix<T>) -> Result<Self> {
        ensure_dim(cutoff.liouville_dim(), matrix.nrows())?;
        ensure_dim(cutoff.liouville_dim(), matrix.ncols())?;
        Ok(Self { cutoff, matrix })
    }

    pub fn scaled_identity(cutoff: FockCutoff, c: Complex<T>) -> Self {
        Self {
            cutoff,
            matrix: SparseMatrix::scaled_identity(cutoff.liouville_dim(), c),
        }
    }

    /// `rho -> X rho`, i.e. `X (x) I`.
    pub fn left(cutoff: FockCutoff, x: &SparseMatrix<T>) -> Result<Self> {
        ensure_dim(cutoff.dim(), x.nrows())?;
        Self::from_sparse(cutoff, x.kron(&SparseMatrix::identity(cutoff.dim())))
    }

    /// `rho -> rho X`, i.e. `I (x) X^T`.
    pub fn right(cutoff: FockCutoff, x: &SparseMatrix<T>) -> Result<Self> {
        ensure_dim(cutoff.dim(), x.nrows())?;
        Self::from_sparse(cutoff, SparseMatrix::identity(cutoff.dim()).kron(&x.transpose()))
    }

    pub fn cutoff(&self) -> &FockCutoff {
        &self.cutoff
    }

    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: self.matrix.add(&other.matrix),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: self.matrix.sub(&other.matrix),
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: self.matrix.scale(c),
        }
    }

    /// `self . other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn apply_vec(&self, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        self.matrix.mul_vec(v)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DMatrix<Complex<T>>> {
        ensure_dim(self.cutoff.dim(), rho.dim())?;
        Ok(unvectorize(&self.apply_vec(&rho.vectorize()), self.cutoff.dim()))
    }

    /// `exp(t S) v`.
    pub fn exp_apply(&self, t: T, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        expm_action(&self.matrix, t, v)
    }

    pub fn to_dense(&self) -> DMatrix<Complex<T>> {
        self.matrix.to_dense()
    }

    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<Complex<T>> {
        self.matrix.block(rows, cols)
    }

    /// Largest entry difference over the given rows and columns.
    pub fn max_abs_diff_on(&self, other: &Self, rows: &[usize], cols: &[usize]) -> T {
        (self.block(rows, cols) - other.block(rows, cols)).camax()
    }
}

/// Row-major vectorization.
pub fn vectorize<T: Real>(m: &DMatrix<Complex<T>>) -> DVector<Complex<T>> {
    let d = m.nrows();
    DVector::from_fn(d * m.ncols(), |k, _| m[(k / d, k % d)])
}

pub fn unvectorize<T: Real>(v: &DVector<Complex<T>>, d: usize) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Matrix of an algebra expression on the truncated Fock space.
///
/// `K(0)_C` is represented as `(H (x) I + I (x) H^T + Tr C) / 2` with
/// `H = sum C_nm a+_n a_m`, which equals its defining form on every state the
/// truncation does not touch and keeps trace preservation exact at the cutoff.
pub fn represent<T: Real>(x: &SuperOpExpr<T>, cutoff: &FockCutoff) -> Result<SuperOpMatrix<T>> {
    ensure_dim(cutoff.mode_count(), x.mode_count())?;
    let ops = mode_operators::<T>(cutoff);
    let d = cutoff.dim();
    let id = SparseMatrix::<T>::identity(d);
    let half = real::<T>(lit(0.5));
    let mut parts: Vec<SparseMatrix<T>> = Vec::new();
    for (kind, c) in x.terms() {
        match kind {
            GeneratorKind::NMinus => {
                let h = bilinear_form(&ops, c);
                parts.push(h.kron(&id));
                parts.push(id.kron(&h.transpose()).scale(-real::<T>(T::one())));
            }
            GeneratorKind::KZero => {
                let h = bilinear_form(&ops, c);
                parts.push(h.kron(&id).scale(half));
                parts.push(id.kron(&h.transpose()).scale(half));
                parts.push(SparseMatrix::scaled_identity(d * d, c.trace() * half));
            }
            GeneratorKind::KPlus | GeneratorKind::KMinus => {
                let m = cutoff.mode_count();
                for n in 0..m {
                    for k in 0..m {
                        let coef = c.get(n, k);
                        if coef.modulus() == T::zero() {
                            continue;
                        }
                        let (l, r) = if kind == GeneratorKind::KPlus {
                            (&ops.creation[n], &ops.annihilation[k])
                        } else {
                            (&ops.annihilation[k], &ops.creation[n])
                        };
                        parts.push(l.kron(&r.transpose()).scale(coef));
                    }
                }
            }
            GeneratorKind::Identity => {}
        }
    }
    parts.push(SparseMatrix::scaled_identity(d * d, x.scalar()));
    SuperOpMatrix::from_sparse(*cutoff, SparseMatrix::sum(d * d, d * d, parts.iter()))
}
