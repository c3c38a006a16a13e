//! Complex `m x m` coefficient matrices attached to generator families.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{ComplexField, DMatrix, SymmetricEigen};
use num_complex::Complex;
use num_traits::Zero;

use crate::error::{ensure_dim, Error, Result};
use crate::scalar::{lit, real, Real};

/// Square complex matrix indexed by mode labels.
///
/// Hermiticity is not required; constructors that need it (the frequency and
/// relaxation matrices) check it themselves.
#[derive(Clone, PartialEq)]
pub struct CoeffMatrix<T: Real>(DMatrix<Complex<T>>);

impl<T: Real> CoeffMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// `c * I`.
    pub fn scalar_identity(dim: usize, c: Complex<T>) -> Self {
        Self(DMatrix::from_diagonal_element(dim, dim, c))
    }

    pub fn from_matrix(m: DMatrix<Complex<T>>) -> Result<Self> {
        ensure_dim(m.nrows(), m.ncols())?;
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(Self(m))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { real(diag[i]) } else { Complex::zero() })
    }

    /// Row-major nested entries.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            ensure_dim(n, row.len())?;
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex<T>> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.0
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.0[(row, col)]
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self(self.0.map(|z| z * c))
    }

    pub fn scale_real(&self, x: T) -> Self {
        self.scale(real(x))
    }

    pub fn trace(&self) -> Complex<T> {
        self.0.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).modulus()))
    }

    /// True only when every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |A - A^dagger|`.
    pub fn hermiticity_deviation(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// Eigenvalues of the Hermitian part `(A + A^dagger)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let h = (&self.0 + self.0.adjoint()).map(|z| z * real(lit::<T>(0.5)));
        let mut vals: Vec<T> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        vals
    }

    /// Dense matrix exponential `exp(self * t)`.
    pub fn exp_scaled(&self, t: T) -> Self {
        Self(self.0.map(|z| z * real(t)).exp())
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> T {
        let g = self.0.adjoint() * &self.0;
        SymmetricEigen::new(g)
            .eigenvalues
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x))
            .sqrt()
    }

    pub fn is_identity_multiple(&self, c: Complex<T>) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { c } else { Complex::zero() };
                self.0[(i, j)] == target
            })
        })
    }
}

impl<T: Real> fmt::Debug for CoeffMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>())).finish()
    }
}

impl<'a, T: Real> Add<&'a CoeffMatrix<T>> for &'a CoeffMatrix<T> {
    type Output = CoeffMatrix<T>;
    fn add(self, rhs: &'a CoeffMatrix<T>) -> CoeffMatrix<T> {
        CoeffMatrix(&self.0 + &rhs.0)
    }
}

impl<T: Real> Add for CoeffMatrix<T> {
    type Output = CoeffMatrix<T>;
    fn add(self, rhs: CoeffMatrix<T>) -> CoeffMatrix<T> {
        CoeffMatrix(self.0 + rhs.0)
    }
}

impl<'a, T: Real> Sub<&'a CoeffMatrix<T>> for &'a CoeffMatrix<T> {
    type Output = CoeffMatrix<T>;
    fn sub(self, rhs: &'a CoeffMatrix<T>) -> CoeffMatrix<T> {
        CoeffMatrix(&self.0 - &rhs.0)
    }
}

impl<T: Real> Sub for CoeffMatrix<T> {
    type Output = CoeffMatrix<T>;
    fn sub(self, rhs: CoeffMatrix<T>) -> CoeffMatrix<T> {
        CoeffMatrix(self.0 - rhs.0)
    }
}

impl<'a, T: Real> Mul<&'a CoeffMatrix<T>> for &'a CoeffMatrix<T> {
    type Output = CoeffMatrix<T>;
    fn mul(self, rhs: &'a CoeffMatrix<T>) -> CoeffMatrix<T> {
        CoeffMatrix(&self.0 * &rhs.0)
    }
}

impl<T: Real> Neg for CoeffMatrix<T> {
    type Output = CoeffMatrix<T>;
    fn neg(self) -> CoeffMatrix<T> {
        CoeffMatrix(-self.0)
    }
}

impl<T: Real> Neg for &CoeffMatrix<T> {
    type Output = CoeffMatrix<T>;
    fn neg(self) -> CoeffMatrix<T> {
        CoeffMatrix(-&self.0)
    }
}

impl<'a, T: Real> AddAssign<&'a CoeffMatrix<T>> for CoeffMatrix<T> {
    fn add_assign(&mut self, rhs: &'a CoeffMatrix<T>) {
        self.0 += &rhs.0;
    }
}

impl<'a, T: Real> SubAssign<&'a CoeffMatrix<T>> for CoeffMatrix<T> {
    fn sub_assign(&mut self, rhs: &'a CoeffMatrix<T>) {
        self.0 -= &rhs.0;
    }
}

/// `(1/2) {A, B}`.
pub(crate) fn half_anticommutator<T: Real>(a: &CoeffMatrix<T>, b: &CoeffMatrix<T>) -> CoeffMatrix<T> {
    a.anticommutator(b).scale_real(lit(0.5))
}

pub(crate) fn half_commutator<T: Real>(a: &CoeffMatrix<T>, b: &CoeffMatrix<T>) -> CoeffMatrix<T> {
    a.commutator(b).scale_real(lit(0.5))
}
