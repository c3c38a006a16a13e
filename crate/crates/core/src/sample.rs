//! Seeded random inputs for the verification suite and tests.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::CoeffMatrix;
use crate::liouvillian::SystemSpec;
use crate::scalar::{lit, Real};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform<T: Real>(rng: &mut SampleRng, half_width: f64) -> T {
    lit(rng.random_range(-half_width..=half_width))
}

/// Entries drawn from `[-s, s] + i[-s, s]`.
pub fn random_coeff<T: Real>(rng: &mut SampleRng, dim: usize, s: f64) -> CoeffMatrix<T> {
    CoeffMatrix::from_fn(dim, |_, _| Complex::new(uniform(rng, s), uniform(rng, s)))
}

pub fn random_hermitian<T: Real>(rng: &mut SampleRng, dim: usize, s: f64) -> CoeffMatrix<T> {
    let a = random_coeff::<T>(rng, dim, s);
    (&a + &a.adjoint()).scale_real(lit(0.5))
}

/// `X X^dagger / dim + floor * I`, Hermitian with spectrum bounded below by `floor`.
pub fn random_positive_definite<T: Real>(rng: &mut SampleRng, dim: usize, s: f64, floor: f64) -> CoeffMatrix<T> {
    let x = random_coeff::<T>(rng, dim, s);
    let g = (&x * &x.adjoint()).scale_real(lit(1.0 / dim as f64));
    let g = &g + &CoeffMatrix::identity(dim).scale_real(lit(floor));
    // exact Hermitian symmetrization removes rounding asymmetry
    (&g + &g.adjoint()).scale_real(lit(0.5))
}

/// Random valid specification: Hermitian frequency matrix, positive-definite
/// relaxation matrix, given thermal occupation.
pub fn random_spec<T: Real>(rng: &mut SampleRng, modes: usize, n_thermal: f64) -> SystemSpec<T> {
    let omega = random_hermitian(rng, modes, 1.0);
    let gamma = random_positive_definite(rng, modes, 0.6, 0.1);
    SystemSpec::new(omega, gamma, lit(n_thermal)).expect("sampled specification is valid")
}

/// Random density matrix `W W^dagger / Tr` of the given dimension.
pub fn random_density_matrix<T: Real>(rng: &mut SampleRng, dim: usize) -> DMatrix<Complex<T>> {
    let w = DMatrix::from_fn(dim, dim, |_, _| Complex::new(uniform::<T>(rng, 1.0), uniform::<T>(rng, 1.0)));
    let rho = &w * w.adjoint();
    let tr = rho.trace();
    let rho = rho.map(|z| z / tr);
    (&rho + rho.adjoint()).map(|z| z * Complex::new(lit(0.5), T::zero()))
}

pub fn random_operator<T: Real>(rng: &mut SampleRng, dim: usize) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(dim, dim, |_, _| Complex::new(uniform::<T>(rng, 1.0), uniform::<T>(rng, 1.0)))
}
