//! Exact, zero-order and linear-in-`n` propagators, the mode evolution
//! matrix `U(t)` and Heisenberg-picture expectations.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;

use super::expm::expm_action_times;
use super::gksl::gksl_matrix;
use super::represent::{represent, unvectorize, vectorize, SuperOpMatrix};
use super::state::DensityMatrix;
use crate::algebra::{GeneratorKind, SuperOpExpr};
use crate::coeff::CoeffMatrix;
use crate::error::{ensure_dim, Error, Result};
use crate::liouvillian::{build_liouvillian, conjugate, zero_order, SystemSpec};
use crate::scalar::{imag_unit, lit, to_f64, Real};

pub const DEFAULT_LEAK_TOLERANCE: f64 = 1e-6;

/// A propagated state with its bookkeeping.
#[derive(Clone, Debug)]
pub struct Propagated<T: Real> {
    pub time: T,
    /// Re-symmetrized `(rho + rho^dagger) / 2`.
    pub rho: DensityMatrix<T>,
    /// `|Tr rho(t) - Tr rho(0)|`.
    pub trace_drift: T,
    /// `max |rho - rho^dagger|` before re-symmetrization.
    pub hermiticity_error: T,
    /// Trace drift exceeded the leak tolerance.
    pub leaked: bool,
}

fn validate_times<T: Real>(times: &[T]) -> Result<()> {
    let mut previous: Option<T> = None;
    for &t in times {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::InvalidTime(to_f64(t)));
        }
        if let Some(p) = previous {
            if t <= p {
                return Err(Error::TimesNotAscending {
                    previous: to_f64(p),
                    next: to_f64(t),
                });
            }
        }
        previous = Some(t);
    }
    Ok(())
}

fn finish<T: Real>(
    rho0: &DensityMatrix<T>,
    time: T,
    v: &DVector<Complex<T>>,
    leak_tolerance: T,
) -> Result<Propagated<T>> {
    let raw = DensityMatrix::from_vector(*rho0.cutoff(), v)?;
    let trace_drift = (raw.trace() - rho0.trace()).modulus();
    let leaked = trace_drift > leak_tolerance;
    if leaked {
        log::warn!(
            "trace drift {:e} at t = {} exceeds leak tolerance {:e}; raise the cutoff",
            to_f64(trace_drift),
            to_f64(time),
            to_f64(leak_tolerance)
        );
    }
    Ok(Propagated {
        time,
        hermiticity_error: raw.hermiticity_deviation(),
        rho: raw.symmetrized(),
        trace_drift,
        leaked,
    })
}

fn propagate_times<T: Real>(
    generator: &SuperOpMatrix<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
    leak_tolerance: T,
) -> Result<Vec<Propagated<T>>> {
    validate_times(times)?;
    ensure_dim(generator.cutoff().dim(), rho0.dim())?;
    expm_action_times(generator.matrix(), times, &rho0.vectorize())
        .iter()
        .zip(times)
        .map(|(v, &t)| finish(rho0, t, v, leak_tolerance))
        .collect()
}

/// `exp(L t) rho0` with `L` assembled from truncated ladder operators (see
/// [`gksl_matrix`]), using the default leak tolerance.
pub fn exact_propagate<T: Real>(spec: &SystemSpec<T>, rho0: &DensityMatrix<T>, t: T) -> Result<Propagated<T>> {
    Ok(exact_trajectory(spec, rho0, &[t], lit(DEFAULT_LEAK_TOLERANCE))?.remove(0))
}

pub fn exact_trajectory<T: Real>(
    spec: &SystemSpec<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
    leak_tolerance: T,
) -> Result<Vec<Propagated<T>>> {
    let generator = gksl_matrix(spec, rho0.cutoff())?;
    propagate_times(&generator, rho0, times, leak_tolerance)
}

/// `exp(X t) rho0` for an arbitrary expression, through [`represent`].
pub fn expr_trajectory<T: Real>(
    x: &SuperOpExpr<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
    leak_tolerance: T,
) -> Result<Vec<Propagated<T>>> {
    let generator = represent(x, rho0.cutoff())?;
    propagate_times(&generator, rho0, times, leak_tolerance)
}

/// `exp(L0 t) rho0`. Only lowering and number-conserving terms appear, so the
/// trace is preserved at any cutoff, and the result is exact once the per-mode
/// cutoff reaches the largest total photon number in `rho0`.
pub fn zero_order_propagate<T: Real>(
    spec: &SystemSpec<T>,
    rho0: &DensityMatrix<T>,
    t: T,
) -> Result<Propagated<T>> {
    Ok(zero_order_trajectory(spec, rho0, &[t])?.remove(0))
}

pub fn zero_order_trajectory<T: Real>(
    spec: &SystemSpec<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
) -> Result<Vec<Propagated<T>>> {
    let photons = rho0.max_total_occupation();
    if rho0.cutoff().mode_count() > 1 && rho0.cutoff().per_mode_max() < photons {
        log::warn!(
            "cutoff {} is below the {photons} photons of the initial state; hopping will be truncated",
            rho0.cutoff().per_mode_max()
        );
    }
    let generator = represent(&zero_order(spec)?, rho0.cutoff())?;
    propagate_times(&generator, rho0, times, lit(DEFAULT_LEAK_TOLERANCE))
}

/// First-order thermal correction `n (K(+) - 2 K(0) + K(-))_{I - U(t)}`.
fn linear_correction<T: Real>(spec: &SystemSpec<T>, t: T) -> Result<SuperOpExpr<T>> {
    let u = evolution_matrix_u(spec, t)?;
    let m = &CoeffMatrix::identity(spec.mode_count()) - &u.u_of_t;
    let n = spec.n_thermal();
    SuperOpExpr::k_plus(m.scale_real(n))
        .with(GeneratorKind::KZero, m.scale_real(-lit::<T>(2.0) * n))?
        .with(GeneratorKind::KMinus, m.scale_real(n))
}

/// `(Id + n (K(+) - 2 K(0) + K(-))_{I-U(t)}) exp(L0 t) rho0`.
///
/// Hopping keeps the total photon number, and the correction adds at most one
/// photon, so the per-mode cutoff must exceed the largest total in `rho0`.
pub fn linear_propagate<T: Real>(spec: &SystemSpec<T>, rho0: &DensityMatrix<T>, t: T) -> Result<Propagated<T>> {
    Ok(linear_trajectory(spec, rho0, &[t])?.remove(0))
}

pub fn linear_trajectory<T: Real>(
    spec: &SystemSpec<T>,
    rho0: &DensityMatrix<T>,
    times: &[T],
) -> Result<Vec<Propagated<T>>> {
    let photons = rho0.max_total_occupation();
    let cutoff = rho0.cutoff().per_mode_max();
    if cutoff <= photons {
        return Err(Error::MissingSpareLevel {
            photons,
            needed: photons + 1,
            cutoff,
        });
    }
    validate_times(times)?;
    let cutoff = *rho0.cutoff();
    let generator = represent(&zero_order(spec)?, &cutoff)?;
    let relaxed = expm_action_times(generator.matrix(), times, &rho0.vectorize());
    relaxed
        .iter()
        .zip(times)
        .map(|(v, &t)| {
            let correction = represent(&linear_correction(spec, t)?, &cutoff)?;
            let full = v + correction.apply_vec(v);
            finish(rho0, t, &full, lit(DEFAULT_LEAK_TOLERANCE))
        })
        .collect()
}

/// `U(t) = exp((-i Omega - Gamma/2) t) exp((i Omega - Gamma/2) t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionMatrixU<T: Real> {
    pub u_of_t: CoeffMatrix<T>,
    pub time: T,
}

pub fn evolution_matrix_u<T: Real>(spec: &SystemSpec<T>, t: T) -> Result<EvolutionMatrixU<T>> {
    validate_times(&[t])?;
    let (left, right) = mode_generators(spec);
    Ok(EvolutionMatrixU {
        u_of_t: &left.exp_scaled(t) * &right.exp_scaled(t),
        time: t,
    })
}

/// `(-i Omega - Gamma/2, i Omega - Gamma/2)`.
pub fn mode_generators<T: Real>(spec: &SystemSpec<T>) -> (CoeffMatrix<T>, CoeffMatrix<T>) {
    let half_gamma = spec.gamma().scale_real(lit(0.5));
    let i_omega = spec.omega().scale(imag_unit());
    (&(-&i_omega) - &half_gamma, &i_omega - &half_gamma)
}

/// `Tr((exp(L+ t) A) rho0)`, evolving the observable with the conjugate
/// Liouvillian.
pub fn heisenberg_expect<T: Real>(
    spec: &SystemSpec<T>,
    observable: &DMatrix<Complex<T>>,
    rho0: &DensityMatrix<T>,
    t: T,
) -> Result<Complex<T>> {
    Ok(heisenberg_trajectory(spec, observable, rho0, &[t])?[0])
}

pub fn heisenberg_trajectory<T: Real>(
    spec: &SystemSpec<T>,
    observable: &DMatrix<Complex<T>>,
    rho0: &DensityMatrix<T>,
    times: &[T],
) -> Result<Vec<Complex<T>>> {
    validate_times(times)?;
    ensure_dim(rho0.dim(), observable.nrows())?;
    ensure_dim(rho0.dim(), observable.ncols())?;
    let dual = represent(&conjugate(&build_liouvillian(spec)), rho0.cutoff())?;
    expm_action_times(dual.matrix(), times, &vectorize(observable))
        .iter()
        .map(|v| rho0.expectation(&unvectorize(v, rho0.dim())))
        .collect()
}

