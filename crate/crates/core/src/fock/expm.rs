//! Action of a sparse matrix exponential on a vector.
//!
//! Truncated Taylor series with time stepping: the interval is split so that
//! each step has `|h| ||A||_1 <= 1`, and each step sums terms until they fall
//! below machine precision relative to the partial sum.

use nalgebra::DVector;
use num_complex::Complex;

use super::sparse::SparseMatrix;
use crate::scalar::{lit, real, Real};

const MAX_TERMS: usize = 80;

/// `exp(t A) v`. `t` may be negative.
pub fn expm_action<T: Real>(a: &SparseMatrix<T>, t: T, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
    let norm = a.one_norm() * t.abs();
    if norm == T::zero() {
        return v.clone();
    }
    let steps = num_traits::ToPrimitive::to_f64(&norm.ceil()).unwrap_or(1.0).max(1.0) as usize;
    let h = t / lit(steps as f64);
    let mut x = v.clone();
    for _ in 0..steps {
        x = taylor_step(a, h, &x);
    }
    x
}

fn taylor_step<T: Real>(a: &SparseMatrix<T>, h: T, v: &DVector<Complex<T>>) -> DVector<Complex<T>> {
    let eps = T::default_epsilon();
    let mut acc = v.clone();
    let mut term = v.clone();
    for k in 1..=MAX_TERMS {
        term = a.mul_vec(&term) * real::<T>(h / lit(k as f64));
        acc += &term;
        let size = term.camax();
        if size == T::zero() || size <= eps * acc.camax() {
            break;
        }
    }
    acc
}

/// States `exp(t_k A) v` for ascending, non-negative `times`, each obtained by
/// stepping from the previous one.
pub fn expm_action_times<T: Real>(
    a: &SparseMatrix<T>,
    times: &[T],
    v: &DVector<Complex<T>>,
) -> Vec<DVector<Complex<T>>> {
    let mut out = Vec::with_capacity(times.len());
    let mut current = v.clone();
    let mut now = T::zero();
    for &t in times {
        current = expm_action(a, t - now, &current);
        now = t;
        out.push(current.clone());
    }
    out
}
