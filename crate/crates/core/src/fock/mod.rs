//! Truncated multi-mode Fock space: the brute-force oracle and evolution engine.
//!
//! Basis states are ordered with mode 0 most significant and photon number
//! ascending within each mode, so for two modes with cutoff `N` the index of
//! `|k0, k1>` is `k0 * (N + 1) + k1`. Density matrices are vectorized
//! row-major: `vec(rho)[i * d + j] = rho[i][j]`.

mod expm;
mod gksl;
mod propagate;
mod represent;
mod sparse;
mod state;

pub use expm::{expm_action, expm_action_times};
pub use gksl::gksl_matrix;
pub use propagate::{
    evolution_matrix_u, exact_propagate, exact_trajectory, expr_trajectory, heisenberg_expect, heisenberg_trajectory,
    linear_propagate, linear_trajectory, mode_generators, zero_order_propagate, zero_order_trajectory,
    EvolutionMatrixU, Propagated, DEFAULT_LEAK_TOLERANCE,
};
pub use represent::{represent, unvectorize, vectorize, SuperOpMatrix};
pub use sparse::SparseMatrix;
pub use state::DensityMatrix;

use num_complex::Complex;

use crate::coeff::CoeffMatrix;
use crate::error::{Error, Result};
use crate::scalar::{lit, real, Real};

/// Largest Hilbert-space dimension accepted; the Liouville space is its square.
pub const MAX_HILBERT_DIM: usize = 1 << 13;

/// Per-mode photon cutoff: every mode holds `0..=per_mode_max` photons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockCutoff {
    mode_count: usize,
    per_mode_max: usize,
}

impl FockCutoff {
    pub fn new(mode_count: usize, per_mode_max: usize) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::InvalidCutoff("mode count must be positive".into()));
        }
        if per_mode_max == 0 {
            return Err(Error::InvalidCutoff("per-mode cutoff must be at least 1".into()));
        }
        let dim = (per_mode_max + 1).checked_pow(mode_count as u32);
        match dim {
            Some(d) if d <= MAX_HILBERT_DIM => Ok(Self {
                mode_count,
                per_mode_max,
            }),
            _ => Err(Error::InvalidCutoff(format!(
                "{mode_count} modes with {per_mode_max} photons each exceeds {MAX_HILBERT_DIM} basis states"
            ))),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn per_mode_max(&self) -> usize {
        self.per_mode_max
    }

    pub fn local_dim(&self) -> usize {
        self.per_mode_max + 1
    }

    /// Hilbert-space dimension `(N+1)^m`.
    pub fn dim(&self) -> usize {
        self.local_dim().pow(self.mode_count as u32)
    }

    /// Liouville-space dimension `(N+1)^(2m)`.
    pub fn liouville_dim(&self) -> usize {
        self.dim() * self.dim()
    }

    pub fn occupation(&self, index: usize) -> Vec<usize> {
        let d = self.local_dim();
        let mut occ = vec![0; self.mode_count];
        let mut rest = index;
        for slot in occ.iter_mut().rev() {
            *slot = rest % d;
            rest /= d;
        }
        occ
    }

    pub fn index_of(&self, occupation: &[usize]) -> Result<usize> {
        if occupation.len() != self.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: occupation.len(),
            });
        }
        let mut idx = 0;
        for &k in occupation {
            if k > self.per_mode_max {
                return Err(Error::InvalidState(format!(
                    "occupation {k} exceeds the cutoff {}",
                    self.per_mode_max
                )));
            }
            idx = idx * self.local_dim() + k;
        }
        Ok(idx)
    }

    pub fn total(&self, index: usize) -> usize {
        self.occupation(index).iter().sum()
    }

    pub fn states_where(&self, mut keep: impl FnMut(&[usize]) -> bool) -> Vec<usize> {
        (0..self.dim()).filter(|&i| keep(&self.occupation(i))).collect()
    }

    /// States with every mode at least `margin` levels below the cutoff.
    pub fn interior_states(&self, margin: usize) -> Vec<usize> {
        let top = self.per_mode_max as isize - margin as isize;
        self.states_where(|occ| occ.iter().all(|&k| k as isize <= top))
    }

    pub fn states_with_total_at_most(&self, total: usize) -> Vec<usize> {
        self.states_where(|occ| occ.iter().sum::<usize>() <= total)
    }

    /// Position of `|ket><bra|` in the vectorized density matrix.
    pub fn liouville_index(&self, ket: usize, bra: usize) -> usize {
        ket * self.dim() + bra
    }

    /// Liouville indices of all `|ket><bra|` with `ket` in `kets` and `bra` in `bras`.
    pub fn liouville_block(&self, kets: &[usize], bras: &[usize]) -> Vec<usize> {
        kets.iter()
            .flat_map(|&k| bras.iter().map(move |&b| self.liouville_index(k, b)))
            .collect()
    }

    /// Embedding index map into a larger cutoff with the same mode count.
    pub fn embedding_into(&self, larger: &FockCutoff) -> Result<Vec<usize>> {
        if larger.mode_count != self.mode_count || larger.per_mode_max < self.per_mode_max {
            return Err(Error::InvalidCutoff(format!(
                "cannot embed cutoff {} into {}",
                self.per_mode_max, larger.per_mode_max
            )));
        }
        (0..self.dim()).map(|i| larger.index_of(&self.occupation(i))).collect()
    }
}

/// Annihilation and creation operators of every mode.
#[derive(Clone, Debug)]
pub struct ModeOperators<T: Real> {
    pub annihilation: Vec<SparseMatrix<T>>,
    pub creation: Vec<SparseMatrix<T>>,
}

pub fn mode_operators<T: Real>(cutoff: &FockCutoff) -> ModeOperators<T> {
    let annihilation: Vec<_> = (0..cutoff.mode_count()).map(|j| annihilation(cutoff, j)).collect();
    let creation = annihilation.iter().map(|a| a.adjoint()).collect();
    ModeOperators {
        annihilation,
        creation,
    }
}

/// `a_j` with `sqrt(k)` connecting `k` to `k-1` photons in mode `j`.
pub fn annihilation<T: Real>(cutoff: &FockCutoff, mode: usize) -> SparseMatrix<T> {
    let d = cutoff.dim();
    let stride = cutoff.local_dim().pow((cutoff.mode_count() - 1 - mode) as u32);
    let mut t = Vec::new();
    for i in 0..d {
        let k = cutoff.occupation(i)[mode];
        if k > 0 {
            t.push((i - stride, i, real(lit::<T>(k as f64).sqrt())));
        }
    }
    SparseMatrix::from_triplets(d, d, t)
}

/// `sum_{n,m} C_nm a+_n a_m`.
pub fn bilinear_form<T: Real>(ops: &ModeOperators<T>, c: &CoeffMatrix<T>) -> SparseMatrix<T> {
    let m = ops.annihilation.len();
    let d = ops.annihilation[0].nrows();
    let mut parts = Vec::new();
    for n in 0..m {
        for k in 0..m {
            let coef: Complex<T> = c.get(n, k);
            if coef != Complex::new(T::zero(), T::zero()) {
                parts.push(ops.creation[n].matmul(&ops.annihilation[k]).scale(coef));
            }
        }
    }
    SparseMatrix::sum(d, d, parts.iter())
}
