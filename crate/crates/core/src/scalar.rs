//! Scalar plumbing shared by every module.
//!
//! All numerics are written against [`Real`], which is implemented for `f32`
//! and `f64`. Complex quantities are `Complex<T>`; the nalgebra
//! `ComplexField` impl supplies modulus, conjugation and the decompositions.

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;

/// Real scalar type backing a computation (`f32` or `f64`).
pub trait Real: RealField + Copy + num_traits::ToPrimitive {}

impl<T> Real for T where T: RealField + Copy + num_traits::ToPrimitive {}

/// Converts an `f64` literal into the working precision.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Complex number from two `f64` parts.
#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// Purely real complex number.
#[inline]
pub fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// The imaginary unit.
#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.modulus()
}

/// Lossy conversion to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
