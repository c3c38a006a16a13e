use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use super::represent::{unvectorize, vectorize};
use super::FockCutoff;
use crate::error::{ensure_dim, Error, Result};
use crate::scalar::{lit, real, to_f64, Real};

/// Tolerance for Hermiticity and unit trace of a supplied density matrix.
pub const STATE_TOLERANCE: f64 = 1e-12;
/// Smallest eigenvalue accepted for a supplied density matrix.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Density matrix on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    cutoff: FockCutoff,
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(cutoff: FockCutoff, matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(cutoff, matrix)?;
        let tol = lit::<T>(STATE_TOLERANCE).max(T::default_epsilon() * lit(64.0));
        let herm = rho.hermiticity_deviation();
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian (max deviation {:e})", to_f64(herm))));
        }
        let tr = rho.trace();
        if (tr - real(T::one())).modulus() > tol {
            return Err(Error::InvalidState(format!("trace is {} instead of 1", to_f64(tr.re))));
        }
        let min = rho.min_eigenvalue();
        if min < -lit::<T>(POSITIVITY_TOLERANCE) {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", to_f64(min))));
        }
        Ok(rho)
    }

    /// Shape check only.
    pub fn from_matrix_unchecked(cutoff: FockCutoff, matrix: DMatrix<Complex<T>>) -> Result<Self> {
        ensure_dim(cutoff.dim(), matrix.nrows())?;
        ensure_dim(cutoff.dim(), matrix.ncols())?;
        Ok(Self { cutoff, matrix })
    }

    pub fn from_vector(cutoff: FockCutoff, v: &DVector<Complex<T>>) -> Result<Self> {
        ensure_dim(cutoff.liouville_dim(), v.len())?;
        Ok(Self {
            cutoff,
            matrix: unvectorize(v, cutoff.dim()),
        })
    }

    /// `|n><n|` for the occupation list `n`.
    pub fn fock(cutoff: FockCutoff, occupation: &[usize]) -> Result<Self> {
        let i = cutoff.index_of(occupation)?;
        let mut m = DMatrix::zeros(cutoff.dim(), cutoff.dim());
        m[(i, i)] = real(T::one());
        Ok(Self { cutoff, matrix: m })
    }

    /// `|psi><psi|` after normalizing `psi`.
    pub fn pure(cutoff: FockCutoff, psi: &DVector<Complex<T>>) -> Result<Self> {
        ensure_dim(cutoff.dim(), psi.len())?;
        let norm = psi.norm();
        if !norm.is_finite() || norm <= T::zero() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi = psi.map(|z| z / real(norm));
        Ok(Self {
            cutoff,
            matrix: &psi * psi.adjoint(),
        })
    }

    /// `(|01> + |10>) / sqrt(2)` for two modes.
    pub fn bell_01_10(cutoff: FockCutoff) -> Result<Self> {
        if cutoff.mode_count() != 2 {
            return Err(Error::InvalidState("bell_01_10 needs exactly two modes".into()));
        }
        let mut psi = DVector::zeros(cutoff.dim());
        psi[cutoff.index_of(&[0, 1])?] = real(T::one());
        psi[cutoff.index_of(&[1, 0])?] = real(T::one());
        Self::pure(cutoff, &psi)
    }

    /// Product of single-mode thermal states with mean occupation `n_mean`,
    /// truncated at the cutoff and renormalized.
    pub fn thermal(cutoff: FockCutoff, n_mean: T) -> Result<Self> {
        if !n_mean.is_finite() || n_mean < T::zero() {
            return Err(Error::InvalidState(format!(
                "thermal occupation must be non-negative, got {}",
                to_f64(n_mean)
            )));
        }
        let ratio = n_mean / (n_mean + T::one());
        let weights: Vec<T> = (0..cutoff.local_dim())
            .map(|k| ratio.powi(k as i32))
            .collect();
        let norm = weights.iter().fold(T::zero(), |a, &b| a + b);
        let mut m = DMatrix::zeros(cutoff.dim(), cutoff.dim());
        for i in 0..cutoff.dim() {
            let p = cutoff
                .occupation(i)
                .iter()
                .fold(T::one(), |acc, &k| acc * weights[k] / norm);
            m[(i, i)] = real(p);
        }
        Ok(Self { cutoff, matrix: m })
    }

    pub fn cutoff(&self) -> &FockCutoff {
        &self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn vectorize(&self) -> DVector<Complex<T>> {
        vectorize(&self.matrix)
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// `Tr(rho^2)`, real part.
    pub fn purity(&self) -> T {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Diagonal entries in basis order.
    pub fn populations(&self) -> Vec<T> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// `Tr(A rho)`.
    pub fn expectation(&self, a: &DMatrix<Complex<T>>) -> Result<Complex<T>> {
        ensure_dim(self.dim(), a.nrows())?;
        ensure_dim(self.dim(), a.ncols())?;
        Ok(a.component_mul(&self.matrix.transpose()).sum())
    }

    /// Mean photon number of one mode.
    pub fn mean_occupation(&self, mode: usize) -> T {
        self.populations()
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &p)| acc + p * lit(self.cutoff.occupation(i)[mode] as f64))
    }

    pub fn hermiticity_deviation(&self) -> T {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// `(rho + rho^dagger) / 2`.
    pub fn symmetrized(&self) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: (&self.matrix + self.matrix.adjoint()).map(|z| z * real(lit::<T>(0.5))),
        }
    }

    fn hermitian_part_eigenvalues(m: &DMatrix<Complex<T>>) -> DVector<T> {
        let h = (m + m.adjoint()).map(|z| z * real(lit::<T>(0.5)));
        SymmetricEigen::new(h).eigenvalues
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> T {
        Self::hermitian_part_eigenvalues(&self.matrix).min()
    }

    /// `||self - other||_1`, the sum of absolute eigenvalues of the difference.
    pub fn trace_distance(&self, other: &Self) -> Result<T> {
        ensure_dim(self.dim(), other.dim())?;
        let diff = &self.matrix - &other.matrix;
        Ok(Self::hermitian_part_eigenvalues(&diff)
            .iter()
            .fold(T::zero(), |a, &x| a + x.abs()))
    }

    /// Largest total photon number of any ket or bra carrying a nonzero element.
    pub fn max_total_occupation(&self) -> usize {
        let d = self.dim();
        self.matrix
            .iter()
            .enumerate()
            .filter(|(_, z)| z.modulus() > T::zero())
            .map(|(k, _)| self.cutoff.total(k % d).max(self.cutoff.total(k / d)))
            .max()
            .unwrap_or(0)
    }

    /// Same state on a larger cutoff, padded with zeros.
    pub fn embed(&self, larger: FockCutoff) -> Result<Self> {
        let map = self.cutoff.embedding_into(&larger)?;
        let mut m = DMatrix::zeros(larger.dim(), larger.dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                m[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(Self {
            cutoff: larger,
            matrix: m,
        })
    }

    /// Block of a larger-cutoff state on the states of `smaller`.
    pub fn restrict(&self, smaller: FockCutoff) -> Result<Self> {
        let map = smaller.embedding_into(&self.cutoff)?;
        let m = DMatrix::from_fn(smaller.dim(), smaller.dim(), |i, j| self.matrix[(map[i], map[j])]);
        Ok(Self { cutoff: smaller, matrix: m })
    }
}
