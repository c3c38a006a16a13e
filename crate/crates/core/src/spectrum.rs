//! Sector-wise spectrum of the diagonal Liouvillian.
//!
//! `L_d` acts on `|k><l|` as `rho -> X rho + rho Y` with
//! `X = sum A_nm a+_n a_m`, `Y = sum B_nm a+_n a_m`, `A = -i Omega - Gamma/2`,
//! `B = i Omega - Gamma/2`. It conserves the total photon number `u` of the
//! ket and `v` of the bra, so it splits into blocks of size `(u+1)(v+1)` for
//! two modes. The thermal occupation does not enter, and `L` and `L0` share
//! these eigenvalues.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix, Schur};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{represent, FockCutoff};
use crate::liouvillian::{diagonal_form, zero_order, SystemSpec};
use crate::coeff::CoeffMatrix;
use crate::scalar::{imag_unit, lit, Real};

/// Total ket-side photon number `u` and bra-side photon number `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorIndex {
    pub u: usize,
    pub v: usize,
}

impl SectorIndex {
    pub fn new(u: usize, v: usize) -> Self {
        Self { u, v }
    }
}

/// `A = -i Omega - Gamma/2` and `B = i Omega - Gamma/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagCoeffs<T: Real> {
    pub a_nm: CoeffMatrix<T>,
    pub b_nm: CoeffMatrix<T>,
}

pub fn diag_coeffs<T: Real>(spec: &SystemSpec<T>) -> DiagCoeffs<T> {
    let half_gamma = spec.gamma().scale_real(lit(0.5));
    let i_omega = spec.omega().scale(imag_unit());
    DiagCoeffs {
        a_nm: &(-&i_omega) - &half_gamma,
        b_nm: &i_omega - &half_gamma,
    }
}

/// Block of `L_d` on one sector.
///
/// For two modes the basis is `|n, u-n><m, v-m|` flattened as
/// `n * (v+1) + m`; the oracle path for other mode counts orders the basis
/// states of each total by Fock index.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorMatrix<T: Real> {
    pub sector: SectorIndex,
    pub matrix: DMatrix<Complex<T>>,
}

impl<T: Real> SectorMatrix<T> {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn flat_index(&self, n: usize, m: usize) -> usize {
        n * (self.sector.v + 1) + m
    }
}

/// Closed-form two-mode sector matrix.
pub fn sector_matrix<T: Real>(spec: &SystemSpec<T>, sector: SectorIndex) -> Result<SectorMatrix<T>> {
    if spec.mode_count() != 2 {
        return Err(Error::Unsupported(format!(
            "closed-form sector matrices need two modes, got {}; use the oracle path",
            spec.mode_count()
        )));
    }
    let DiagCoeffs { a_nm: a, b_nm: b } = diag_coeffs(spec);
    let SectorIndex { u, v } = sector;
    let dim = (u + 1) * (v + 1);
    let flat = |n: usize, m: usize| n * (v + 1) + m;
    let root = |x: usize| lit::<T>(x as f64).sqrt();
    let mut mat = DMatrix::zeros(dim, dim);
    for n in 0..=u {
        for m in 0..=v {
            let col = flat(n, m);
            let (ket1, ket2, bra1, bra2) = (n as f64, (u - n) as f64, m as f64, (v - m) as f64);
            mat[(col, col)] = a.get(0, 0) * lit::<T>(ket1)
                + a.get(1, 1) * lit::<T>(ket2)
                + b.get(0, 0) * lit::<T>(bra1)
                + b.get(1, 1) * lit::<T>(bra2);
            // a+_1 a_2 moves a ket photon from mode 2 to mode 1
            if n < u {
                mat[(flat(n + 1, m), col)] += a.get(0, 1) * root((n + 1) * (u - n));
            }
            if n > 0 {
                mat[(flat(n - 1, m), col)] += a.get(1, 0) * root(n * (u - n + 1));
            }
            // <l| a+_1 a_2 moves a bra photon from mode 1 to mode 2
            if m > 0 {
                mat[(flat(n, m - 1), col)] += b.get(0, 1) * root(m * (v - m + 1));
            }
            if m < v {
                mat[(flat(n, m + 1), col)] += b.get(1, 0) * root((m + 1) * (v - m));
            }
        }
    }
    Ok(SectorMatrix { sector, matrix: mat })
}

/// Sector block obtained by representing `L_d` on the Fock space and
/// projecting; works for any mode count.
pub fn oracle_sector_matrix<T: Real>(spec: &SystemSpec<T>, sector: SectorIndex) -> Result<SectorMatrix<T>> {
    let SectorIndex { u, v } = sector;
    let cutoff = FockCutoff::new(spec.mode_count(), u.max(v).max(1))?;
    let kets = cutoff.states_where(|occ| occ.iter().sum::<usize>() == u);
    let bras = cutoff.states_where(|occ| occ.iter().sum::<usize>() == v);
    let idx = cutoff.liouville_block(&kets, &bras);
    let rep = represent(&diagonal_form(spec), &cutoff)?;
    Ok(SectorMatrix {
        sector,
        matrix: rep.block(&idx, &idx),
    })
}

/// Orders by real part descending, then imaginary part ascending.
pub fn sort_eigenvalues<T: Real>(values: &mut [Complex<T>]) {
    values.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
    });
}

/// Eigenvalues of a dense complex matrix from its Schur form, sorted with
/// [`sort_eigenvalues`].
pub fn dense_eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> Option<Vec<Complex<T>>> {
    if m.nrows() == 1 {
        return Some(vec![m[(0, 0)]]);
    }
    let schur = Schur::try_new(m.clone(), T::default_epsilon(), 10_000 * m.nrows())?;
    let (_, t) = schur.unpack();
    let mut vals: Vec<_> = t.diagonal().iter().copied().collect();
    sort_eigenvalues(&mut vals);
    Some(vals)
}

pub fn sector_eigenvalues<T: Real>(mat: &SectorMatrix<T>) -> Result<Vec<Complex<T>>> {
    dense_eigenvalues(&mat.matrix).ok_or(Error::EigenSolver {
        u: mat.sector.u,
        v: mat.sector.v,
    })
}

/// Spectra of every sector with `u, v <= max_total`, computed in parallel.
pub fn full_spectrum<T: Real>(
    spec: &SystemSpec<T>,
    max_total: usize,
) -> Result<BTreeMap<SectorIndex, Vec<Complex<T>>>> {
    let sectors: Vec<SectorIndex> = (0..=max_total)
        .flat_map(|u| (0..=max_total).map(move |v| SectorIndex::new(u, v)))
        .collect();
    sectors
        .into_par_iter()
        .map(|s| {
            let mat = sector_matrix(spec, s)?;
            Ok((s, sector_eigenvalues(&mat)?))
        })
        .collect()
}

/// Eigenvalues of `L0` represented at per-mode cutoff `n` and restricted to
/// kets and bras with at most `n` photons in total. `L0` never raises the
/// total, so this block is exact and holds every sector with `u, v <= n`.
pub fn zero_order_oracle_eigenvalues<T: Real>(spec: &SystemSpec<T>, n: usize) -> Result<Vec<Complex<T>>> {
    let cutoff = FockCutoff::new(spec.mode_count(), n)?;
    let states = cutoff.states_with_total_at_most(n);
    let idx = cutoff.liouville_block(&states, &states);
    let block = represent(&zero_order(spec)?, &cutoff)?.block(&idx, &idx);
    dense_eigenvalues(&block).ok_or(Error::EigenSolver { u: n, v: n })
}

/// Greedy nearest-neighbour pairing of two eigenvalue multisets after
/// sorting by `(Re, Im)`. Returns the largest pair distance, or `None` when
/// the sizes differ.
pub fn match_multisets<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Option<T> {
    if a.len() != b.len() {
        return None;
    }
    let key = |x: &Complex<T>, y: &Complex<T>| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
    };
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(key);
    b.sort_by(key);
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    for x in &a {
        let (best, dist) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (*x - *y).modulus()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap_or(Ordering::Equal))?;
        used[best] = true;
        worst = worst.max(dist);
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{random_spec, rng};
    use crate::scalar::cplx;

    fn decoupled(w1: f64, w2: f64, g1: f64, g2: f64) -> SystemSpec<f64> {
        SystemSpec::new(
            CoeffMatrix::from_real_diagonal(&[w1, w2]),
            CoeffMatrix::from_real_diagonal(&[g1, g2]),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn vacuum_sector_is_zero() {
        let spec = random_spec::<f64>(&mut rng(21), 2, 0.3);
        let m = sector_matrix(&spec, SectorIndex::new(0, 0)).unwrap();
        assert_eq!(m.dim(), 1);
        assert_eq!(sector_eigenvalues(&m).unwrap(), vec![cplx(0.0, 0.0)]);
    }

    #[test]
    fn decoupled_single_photon_sector() {
        let spec = decoupled(1.0, 1.7, 0.2, 0.4);
        let m = sector_matrix(&spec, SectorIndex::new(1, 0)).unwrap().matrix;
        // n = 0 puts the photon in mode 2
        assert!((m[(0, 0)] - cplx(-0.2, -1.7)).norm() < 1e-15);
        assert!((m[(1, 1)] - cplx(-0.1, -1.0)).norm() < 1e-15);
        assert_eq!(m[(0, 1)], cplx(0.0, 0.0));
    }

    #[test]
    fn decoupled_eigenvalues_read_off_the_diagonal() {
        let (w, g) = (1.3, 0.25);
        let spec = decoupled(w, 0.8, g, 0.5);
        for (u, v) in [(2, 1), (3, 3)] {
            let vals = sector_eigenvalues(&sector_matrix(&spec, SectorIndex::new(u, v)).unwrap()).unwrap();
            // all photons in mode 1: lambda = -i w (u - v) - g (u + v) / 2
            let expected = cplx(-g * (u + v) as f64 / 2.0, -w * (u as f64 - v as f64));
            assert!(vals.iter().any(|z| (*z - expected).norm() < 1e-12));
        }
    }

    #[test]
    fn five_diagonal_structure() {
        let spec = random_spec::<f64>(&mut rng(22), 2, 0.0);
        let m = sector_matrix(&spec, SectorIndex::new(3, 2)).unwrap();
        let v1 = 3;
        let allowed = [0isize, 1, -1, v1, -v1];
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                if m.matrix[(i, j)].norm() > 0.0 {
                    assert!(allowed.contains(&(i as isize - j as isize)), "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn closed_form_matches_oracle_projection() {
        let spec = random_spec::<f64>(&mut rng(23), 2, 0.0);
        for (u, v) in [(1, 1), (2, 3), (0, 2)] {
            let s = SectorIndex::new(u, v);
            let closed = sector_matrix(&spec, s).unwrap();
            let oracle = oracle_sector_matrix(&spec, s).unwrap();
            assert!((closed.matrix - oracle.matrix).camax() < 1e-13);
        }
    }

    #[test]
    fn three_modes_are_unsupported_in_closed_form() {
        let spec = random_spec::<f64>(&mut rng(24), 3, 0.0);
        assert!(matches!(sector_matrix(&spec, SectorIndex::new(1, 1)), Err(Error::Unsupported(_))));
        assert_eq!(oracle_sector_matrix(&spec, SectorIndex::new(1, 1)).unwrap().dim(), 9);
    }

    #[test]
    fn conjugate_sectors_have_conjugate_spectra() {
        let spec = random_spec::<f64>(&mut rng(25), 2, 0.0);
        let a = sector_eigenvalues(&sector_matrix(&spec, SectorIndex::new(3, 1)).unwrap()).unwrap();
        let b = sector_eigenvalues(&sector_matrix(&spec, SectorIndex::new(1, 3)).unwrap()).unwrap();
        let conj: Vec<_> = b.iter().map(|z| z.conj()).collect();
        assert!(match_multisets(&a, &conj).unwrap() < 1e-10);
    }

    #[test]
    fn multiset_matching() {
        let a = [cplx::<f64>(1.0, 0.0), cplx(0.0, 1.0)];
        let b = [cplx(0.0, 1.0 + 1e-9), cplx(1.0, 0.0)];
        assert!(match_multisets(&a, &b).unwrap() < 2e-9);
        assert!(match_multisets(&a, &b[..1]).is_none());
    }
}
