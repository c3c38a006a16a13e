//! The master equation assembled directly from truncated ladder operators:
//!
//! ```text
//! L rho = -i [H, rho]
//!       + sum_nm G_nm (n+1) (a_m rho a+_n - {a+_n a_m, rho} / 2)
//!       + sum_nm G_nm  n    (a+_n rho a_m - {a_m a+_n, rho} / 2)
//! ```
//!
//! with `H = sum_nm W_nm a+_n a_m`. Products such as `a_m a+_n` are taken
//! between truncated matrices, so the result is a generator on the finite
//! space in its own right: trace preserving at every cutoff. It agrees with
//! the algebraic form away from the top level of each mode.

use num_complex::Complex;

use super::represent::SuperOpMatrix;
use super::sparse::SparseMatrix;
use super::{bilinear_form, mode_operators, FockCutoff};
use crate::error::{ensure_dim, Result};
use crate::liouvillian::SystemSpec;
use crate::scalar::{imag_unit, lit, real, Real};

pub fn gksl_matrix<T: Real>(spec: &SystemSpec<T>, cutoff: &FockCutoff) -> Result<SuperOpMatrix<T>> {
    ensure_dim(cutoff.mode_count(), spec.mode_count())?;
    let m = spec.mode_count();
    let d = cutoff.dim();
    let ops = mode_operators::<T>(cutoff);
    let id = SparseMatrix::<T>::identity(d);
    let left = |x: &SparseMatrix<T>| x.kron(&id);
    let right = |x: &SparseMatrix<T>| id.kron(&x.transpose());
    let half = real::<T>(lit(0.5));

    let h = bilinear_form(&ops, spec.omega());
    let mut parts = vec![left(&h).scale(-imag_unit::<T>()), right(&h).scale(imag_unit::<T>())];
    let n = spec.n_thermal();
    let rates = [(n + T::one(), true), (n, false)];
    for k in 0..m {
        for j in 0..m {
            let g: Complex<T> = spec.gamma().get(k, j);
            if g == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for &(rate, lowering) in &rates {
                if rate == T::zero() {
                    continue;
                }
                // jump `x rho y`, anticommutator with `y x`
                let (x, y) = if lowering {
                    (&ops.annihilation[j], &ops.creation[k])
                } else {
                    (&ops.creation[k], &ops.annihilation[j])
                };
                let c = g * real(rate);
                let yx = y.matmul(x);
                parts.push(x.kron(&y.transpose()).scale(c));
                parts.push(left(&yx).scale(-c * half));
                parts.push(right(&yx).scale(-c * half));
            }
        }
    }
    SuperOpMatrix::from_sparse(*cutoff, SparseMatrix::sum(d * d, d * d, parts.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{represent, DensityMatrix};
    use crate::identities::interior_block;
    use crate::liouvillian::build_liouvillian;
    use crate::sample::{random_spec, rng};
    use nalgebra::DVector;

    #[test]
    fn matches_algebraic_form_in_the_interior() {
        let mut r = rng(21);
        for modes in [1, 2] {
            let spec = random_spec::<f64>(&mut r, modes, 0.7);
            let cutoff = FockCutoff::new(modes, 3).unwrap();
            let direct = gksl_matrix(&spec, &cutoff).unwrap();
            let algebraic = represent(&build_liouvillian(&spec), &cutoff).unwrap();
            let idx = interior_block(&cutoff, 1);
            assert!(direct.max_abs_diff_on(&algebraic, &idx, &idx) < 1e-13);
        }
    }

    #[test]
    fn trace_functional_is_annihilated() {
        let spec = random_spec::<f64>(&mut rng(22), 2, 0.4);
        let cutoff = FockCutoff::new(2, 3).unwrap();
        let l = gksl_matrix(&spec, &cutoff).unwrap();
        // vec(I)^T L == 0
        let d = cutoff.dim();
        let trace_row = DVector::from_fn(d * d, |k, _| if k / d == k % d { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) });
        let dense = l.to_dense();
        let row = dense.transpose() * trace_row;
        assert!(row.camax() < 1e-13);
    }

    #[test]
    fn truncated_thermal_state_is_stationary() {
        // detailed balance holds level by level, so the truncated Gibbs state is exact
        let spec = SystemSpec::single_mode(1.3, 0.4, 0.6).unwrap();
        let cutoff = FockCutoff::new(1, 6).unwrap();
        let rho = DensityMatrix::thermal(cutoff, 0.6).unwrap();
        let out = gksl_matrix(&spec, &cutoff).unwrap().apply(&rho).unwrap();
        assert!(out.camax() < 1e-15);
    }
}
