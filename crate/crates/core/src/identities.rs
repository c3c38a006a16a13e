//! Oracle identity suite: every algebraic rewrite checked against its
//! brute-force Fock-space representation.
//!
//! Comparisons involving raising terms are restricted to matrix elements away
//! from the cutoff, where truncation cannot reach.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use crate::algebra::{GeneratorKind, Sign, SuperOpExpr};
use crate::coeff::CoeffMatrix;
use crate::error::Result;
use crate::fock::{
    evolution_matrix_u, expm_action, expm_action_times, mode_generators, represent, unvectorize, vectorize,
    DensityMatrix, FockCutoff, SparseMatrix, SuperOpMatrix,
};
use crate::liouvillian::{
    build_liouvillian, conjugate, diagonal_form, diagonalize, linear_ansatz_check, single_mode_branches,
    zero_order, SystemSpec,
};
use crate::sample::{random_coeff, random_density_matrix, random_operator, rng, SampleRng};
use crate::scalar::{lit, real, to_f64, Real};

/// Outcome of one identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    pub fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self {
            name,
            residual,
            tolerance,
            passed: residual.is_finite() && residual < tolerance,
        }
    }
}

type Vector<T> = DVector<Complex<T>>;

fn unit_vector<T: Real>(dim: usize, i: usize) -> Vector<T> {
    let mut v = DVector::zeros(dim);
    v[i] = real(T::one());
    v
}

/// Largest difference between two linear maps, sampled column by column on
/// `cols` and read on `rows`.
pub fn column_residual<T, L, R>(dim: usize, rows: &[usize], cols: &[usize], lhs: L, rhs: R) -> T
where
    T: Real,
    L: Fn(&Vector<T>) -> Vector<T> + Sync,
    R: Fn(&Vector<T>) -> Vector<T> + Sync,
{
    cols.par_iter()
        .map(|&j| {
            let e = unit_vector::<T>(dim, j);
            let (a, b) = (lhs(&e), rhs(&e));
            rows.iter().fold(T::zero(), |acc, &i| acc.max((a[i] - b[i]).modulus()))
        })
        .reduce(T::zero, |a, b| a.max(b))
}

/// Liouville indices whose ket and bra both have every mode at least
/// `margin` levels below the cutoff.
pub fn interior_block(cutoff: &FockCutoff, margin: usize) -> Vec<usize> {
    let states = cutoff.interior_states(margin);
    cutoff.liouville_block(&states, &states)
}

/// Liouville indices whose ket and bra both hold at most `total` photons.
pub fn total_block(cutoff: &FockCutoff, total: usize) -> Vec<usize> {
    let states = cutoff.states_with_total_at_most(total);
    cutoff.liouville_block(&states, &states)
}

/// `represent([X, Y])` against the matrix commutator, on the interior block.
pub fn commutator_oracle_residual<T: Real>(
    x: &SuperOpExpr<T>,
    y: &SuperOpExpr<T>,
    cutoff: &FockCutoff,
) -> Result<T> {
    let symbolic = represent(&x.commutator(y)?, cutoff)?;
    let brute = represent(x, cutoff)?.commutator(&represent(y, cutoff)?);
    let idx = interior_block(cutoff, 1);
    Ok(symbolic.max_abs_diff_on(&brute, &idx, &idx))
}

/// `represent(exp(K_B) X exp(-K_B))` against the product of represented
/// exponentials, on the interior block.
pub fn similarity_oracle_residual<T: Real>(
    x: &SuperOpExpr<T>,
    sign: Sign,
    b: &CoeffMatrix<T>,
    cutoff: &FockCutoff,
) -> Result<T> {
    let symbolic = represent(&x.similarity(sign, b)?, cutoff)?;
    let k = represent(&SuperOpExpr::single(sign.family(), b.clone()), cutoff)?;
    let xm = represent(x, cutoff)?;
    let idx = interior_block(cutoff, 1);
    let one = T::one();
    Ok(column_residual(
        cutoff.liouville_dim(),
        &idx,
        &idx,
        |v| symbolic.apply_vec(v),
        |v| k.exp_apply(one, &xm.apply_vec(&k.exp_apply(-one, v))),
    ))
}

/// Random single-family expressions for every ordered family pair, checked
/// against the oracle. Returns the largest residual.
pub fn commutator_oracle_sweep<T: Real>(
    rng: &mut SampleRng,
    modes: usize,
    pairs: usize,
    cutoff: &FockCutoff,
) -> Result<T> {
    let mut worst = T::zero();
    for _ in 0..pairs {
        let a = random_coeff::<T>(rng, modes, 1.0);
        let b = random_coeff::<T>(rng, modes, 1.0);
        for ka in GeneratorKind::FAMILIES {
            for kb in GeneratorKind::FAMILIES {
                let x = SuperOpExpr::single(ka, a.clone());
                let y = SuperOpExpr::single(kb, b.clone());
                worst = worst.max(commutator_oracle_residual(&x, &y, cutoff)?);
            }
        }
    }
    Ok(worst)
}

/// Both similarity transforms of every family with `|B_ij| <= scale`.
pub fn similarity_oracle_sweep<T: Real>(
    rng: &mut SampleRng,
    modes: usize,
    samples: usize,
    scale: f64,
    cutoff: &FockCutoff,
) -> Result<T> {
    let mut worst = T::zero();
    for _ in 0..samples {
        let b = random_coeff::<T>(rng, modes, scale);
        for sign in [Sign::Plus, Sign::Minus] {
            for kind in GeneratorKind::FAMILIES {
                let x = SuperOpExpr::single(kind, random_coeff::<T>(rng, modes, 1.0));
                worst = worst.max(similarity_oracle_residual(&x, sign, &b, cutoff)?);
            }
        }
    }
    Ok(worst)
}

/// Rebuilds `L` from `L_d` with the inverse transforms, symbolically and on
/// the represented interior block. Returns `(symbolic, represented)`.
pub fn round_trip_residuals<T: Real>(spec: &SystemSpec<T>, cutoff: &FockCutoff) -> Result<(T, T)> {
    let d = diagonalize(spec)?;
    let rebuilt = d
        .l_diag
        .similarity(Sign::Minus, &-&d.a_matrix)?
        .similarity(Sign::Plus, &-&d.b_matrix)?;
    let l = build_liouvillian(spec);
    let symbolic = rebuilt.max_abs_diff(&l)?;
    let idx = interior_block(cutoff, 1);
    let represented = represent(&rebuilt, cutoff)?.max_abs_diff_on(&represent(&l, cutoff)?, &idx, &idx);
    Ok((symbolic, represented))
}

/// `exp(L t)` against
/// `exp(b K+_I) exp(-n K-_I) exp(L0 t) exp(n K-_I) exp(-b K+_I)`, `b = n/(n+1)`,
/// on kets and bras holding at most `support` photons in total.
pub fn factorization_residual<T: Real>(
    spec: &SystemSpec<T>,
    cutoff: &FockCutoff,
    support: usize,
    t: T,
) -> Result<T> {
    let m = spec.mode_count();
    let n = spec.n_thermal();
    let beta = n / (n + T::one());
    let id = CoeffMatrix::identity(m);
    // Intermode hopping leaves the per-mode cube but not a total-number shell.
    let shell = cutoff.states_with_total_at_most(cutoff.per_mode_max());
    let keep = cutoff.liouville_block(&shell, &shell);
    let restricted = |x: &SuperOpExpr<T>| -> Result<SparseMatrix<T>> { Ok(represent(x, cutoff)?.matrix().restrict(&keep)) };
    let l = restricted(&build_liouvillian(spec))?;
    let l0 = restricted(&zero_order(spec)?)?;
    let kp = restricted(&SuperOpExpr::k_plus(id.clone()))?;
    let km = restricted(&SuperOpExpr::k_minus(id))?;
    let low = cutoff.states_with_total_at_most(support);
    let mut pos = vec![usize::MAX; cutoff.liouville_dim()];
    for (p, &k) in keep.iter().enumerate() {
        pos[k] = p;
    }
    let idx: Vec<usize> = cutoff.liouville_block(&low, &low).into_iter().map(|k| pos[k]).collect();
    Ok(column_residual(
        keep.len(),
        &idx,
        &idx,
        |v| expm_action(&l, t, v),
        |v| {
            let v = expm_action(&kp, -beta, v);
            let v = expm_action(&km, n, &v);
            let v = expm_action(&l0, t, &v);
            let v = expm_action(&km, -n, &v);
            expm_action(&kp, beta, &v)
        },
    ))
}

/// The four conjugation identities used to derive the linear propagator:
///
/// ```text
/// exp(L_d t) K0_I exp(-L_d t)  = K0_I
/// exp(L_d t) K+_I exp(-L_d t)  = K+_U(t)
/// exp(-K-_I) K+_U exp(K-_I)    = K+_U - 2 K0_U + K-_U
/// exp(-K-_I) K0_I exp(K-_I)    = K0_I - K-_I
/// ```
pub fn appendix_d_residuals<T: Real>(spec: &SystemSpec<T>, cutoff: &FockCutoff, t: T) -> Result<[T; 4]> {
    let m = spec.mode_count();
    let dim = cutoff.liouville_dim();
    let id = CoeffMatrix::identity(m);
    let u = evolution_matrix_u(spec, t)?.u_of_t;
    let ld = represent(&diagonal_form(spec), cutoff)?;
    let k0 = represent(&SuperOpExpr::k_zero(id.clone()), cutoff)?;
    let kp = represent(&SuperOpExpr::k_plus(id.clone()), cutoff)?;
    let km = represent(&SuperOpExpr::k_minus(id.clone()), cutoff)?;
    let kp_u = represent(&SuperOpExpr::k_plus(u.clone()), cutoff)?;

    // L_d conserves both photon totals, so blocks below the top total are exact.
    let conserving = total_block(cutoff, cutoff.per_mode_max() - 1);
    let interior = interior_block(cutoff, 1);
    let conj = |s: &SuperOpMatrix<T>, gen: &SuperOpMatrix<T>, a: T| {
        let s = s.clone();
        let gen = gen.clone();
        move |v: &Vector<T>| gen.exp_apply(a, &s.apply_vec(&gen.exp_apply(-a, v)))
    };

    let r1 = column_residual(dim, &conserving, &conserving, conj(&k0, &ld, t), |v| k0.apply_vec(v));
    let r2 = column_residual(dim, &conserving, &conserving, conj(&kp, &ld, t), |v| kp_u.apply_vec(v));
    let rhs3 = represent(
        &SuperOpExpr::k_plus(u.clone())
            .with(GeneratorKind::KZero, u.scale_real(-lit::<T>(2.0)))?
            .with(GeneratorKind::KMinus, u)?,
        cutoff,
    )?;
    let r3 = column_residual(dim, &interior, &interior, conj(&kp_u, &km, -T::one()), |v| rhs3.apply_vec(v));
    let rhs4 = represent(&SuperOpExpr::k_zero(id.clone()).with(GeneratorKind::KMinus, -id)?, cutoff)?;
    let r4 = column_residual(dim, &interior, &interior, conj(&k0, &km, -T::one()), |v| rhs4.apply_vec(v));
    Ok([r1, r2, r3, r4])
}

/// `max |Tr(A exp(L t) rho) - Tr((exp(L+ t) A) rho)|` over the given
/// observables and times.
pub fn duality_residual<T: Real>(
    spec: &SystemSpec<T>,
    rho: &DensityMatrix<T>,
    observables: &[DMatrix<Complex<T>>],
    times: &[T],
) -> Result<T> {
    let cutoff = rho.cutoff();
    let l = represent(&build_liouvillian(spec), cutoff)?;
    let dual = represent(&conjugate(&build_liouvillian(spec)), cutoff)?;
    let states = expm_action_times(l.matrix(), times, &rho.vectorize());
    let mut worst = T::zero();
    for a in observables {
        let evolved = expm_action_times(dual.matrix(), times, &vectorize(a));
        for (s, o) in states.iter().zip(&evolved) {
            let schrodinger = DensityMatrix::from_matrix_unchecked(*cutoff, unvectorize(s, rho.dim()))?.expectation(a)?;
            let heisenberg = rho.expectation(&unvectorize(o, rho.dim()))?;
            worst = worst.max((schrodinger - heisenberg).modulus());
        }
    }
    Ok(worst)
}

/// `U(t)` from dense exponentials against the series
/// `sum_k t^k S^k(I) / k!` with `S(M) = X M + M Y`.
pub fn evolution_series_residual<T: Real>(spec: &SystemSpec<T>, t: T) -> Result<T> {
    let (x, y) = mode_generators(spec);
    let m = spec.mode_count();
    let mut term = CoeffMatrix::identity(m);
    let mut sum = term.clone();
    for k in 1..200 {
        term = (&(&x * &term) + &(&term * &y)).scale_real(t / lit(k as f64));
        sum += &term;
        if term.max_abs() < T::default_epsilon() * sum.max_abs() {
            break;
        }
    }
    Ok(sum.max_abs_diff(&evolution_matrix_u(spec, t)?.u_of_t))
}

/// `represent(X) vec(rho) == vec(X rho)` for left and right multiplication.
pub fn vectorization_residual<T: Real>(rng: &mut SampleRng, cutoff: &FockCutoff) -> Result<T> {
    let a = random_operator::<T>(rng, cutoff.dim());
    let rho = random_operator::<T>(rng, cutoff.dim());
    let sa = crate::fock::SparseMatrix::from_dense(&a);
    let left = SuperOpMatrix::left(*cutoff, &sa)?.apply_vec(&vectorize(&rho));
    let right = SuperOpMatrix::right(*cutoff, &sa)?.apply_vec(&vectorize(&rho));
    Ok((left - vectorize(&(&a * &rho)))
        .camax()
        .max((right - vectorize(&(&rho * &a))).camax()))
}

/// Settings for [`run_identity_suite`].
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub cutoff: usize,
    pub seed: u64,
    /// Random coefficient pairs for the commutator sweep.
    pub commutator_pairs: usize,
    /// Random transforms per sign for the similarity sweep.
    pub similarity_samples: usize,
    /// Time for the factorization check, in units of `1/||Gamma||`.
    pub factorization_time: f64,
    /// Replaces every per-identity tolerance when set.
    pub tolerance_override: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            cutoff: 5,
            seed: 7,
            commutator_pairs: 3,
            similarity_samples: 2,
            factorization_time: FACTORIZATION_TIME,
            tolerance_override: None,
        }
    }
}

/// Default factorization time in units of `1/||Gamma||`.
pub const FACTORIZATION_TIME: f64 = 0.05;

/// Runs every identity for `spec` and reports each residual.
pub fn run_identity_suite<T: Real>(spec: &SystemSpec<T>, options: &SuiteOptions) -> Result<Vec<IdentityCheck>> {
    let m = spec.mode_count();
    let cutoff = FockCutoff::new(m, options.cutoff)?;
    let small = FockCutoff::new(m, options.cutoff.min(4))?;
    let mut r = rng(options.seed);
    let gamma_norm = to_f64(spec.gamma().spectral_norm());
    let t_ref: T = lit(0.3 / gamma_norm);
    let mut out = Vec::new();
    let mut push = |name: &'static str, residual: T, tolerance: f64| {
        let tolerance = options.tolerance_override.unwrap_or(tolerance);
        out.push(IdentityCheck::new(name, to_f64(residual), tolerance));
    };

    push("vectorization_contract", vectorization_residual(&mut r, &small)?, 1e-12);
    push(
        "commutator_oracle",
        commutator_oracle_sweep(&mut r, m, options.commutator_pairs, &small)?,
        1e-9,
    );
    push(
        "similarity_oracle",
        similarity_oracle_sweep(&mut r, m, options.similarity_samples, 0.5, &small)?,
        1e-9,
    );

    let d = diagonalize(spec)?;
    push("riccati_residual_r", d.residual_r, 1e-12);
    push("riccati_residual_z", d.residual_z, 1e-12);
    let stray = [GeneratorKind::KPlus, GeneratorKind::KMinus]
        .iter()
        .filter(|k| d.l_diag.contains(**k))
        .count();
    push("diagonal_form_structure", lit(stray as f64), 0.5);
    let (symbolic, represented) = round_trip_residuals(spec, &small)?;
    push("diagonal_round_trip_symbolic", symbolic, 1e-12);
    push("diagonal_round_trip_oracle", represented, 1e-8);

    let l0 = zero_order(spec)?;
    let via_similarity = d.l_diag.similarity(Sign::Minus, &-CoeffMatrix::identity(m))?;
    push("zero_order_similarity", via_similarity.max_abs_diff(&l0)?, 1e-12);

    let branch_residual = single_mode_branches(spec.n_thermal())
        .iter()
        .zip([T::one(), -T::one()])
        .fold(T::zero(), |acc, (b, k0)| {
            acc.max(b.plus_residual).max(b.minus_residual).max((b.k_zero - k0).abs())
        });
    push("single_mode_branches", branch_residual, 1e-12);
    let ansatz = linear_ansatz_check(spec, &d.b_matrix);
    push(
        "linear_riccati_ansatz",
        ansatz.zero_order_residual.max(ansatz.first_order_residual),
        1e-12,
    );

    let t_fact: T = lit(options.factorization_time / gamma_norm);
    let support = options.cutoff.saturating_sub(4);
    push("factorization", factorization_residual(spec, &cutoff, support, t_fact)?, 1e-6);
    let [d1, d2, d3, d4] = appendix_d_residuals(spec, &cutoff, t_ref)?;
    push("diagonal_evolution_fixes_k0", d1, 1e-9);
    push("diagonal_evolution_of_kplus", d2, 1e-9);
    push("lowering_conjugation_of_kplus", d3, 1e-9);
    push("lowering_conjugation_of_k0", d4, 1e-9);
    push("evolution_matrix_series", evolution_series_residual(spec, t_ref)?, 1e-10);

    let rho = DensityMatrix::from_matrix_unchecked(small, random_density_matrix::<T>(&mut r, small.dim()))?;
    let observables: Vec<_> = (0..3).map(|_| random_operator::<T>(&mut r, small.dim())).collect();
    let times = [t_ref, t_ref * lit(2.0), t_ref * lit(4.0)];
    push("heisenberg_duality", duality_residual(spec, &rho, &observables, &times)?, 1e-9);
    let l = build_liouvillian(spec);
    push("conjugation_involution", conjugate(&conjugate(&l)).max_abs_diff(&l)?, 1e-15);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::random_spec;

    #[test]
    fn identity_check_flags_failures() {
        assert!(IdentityCheck::new("x", 1e-13, 1e-12).passed);
        assert!(!IdentityCheck::new("x", 1e-11, 1e-12).passed);
        assert!(!IdentityCheck::new("x", f64::NAN, 1e-12).passed);
    }

    #[test]
    fn single_mode_suite_passes() {
        let spec = SystemSpec::single_mode(1.0, 0.2, 0.1).unwrap();
        let checks = run_identity_suite(&spec, &SuiteOptions { cutoff: 6, ..Default::default() }).unwrap();
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn commutator_sweep_two_modes() {
        let c = FockCutoff::new(2, 3).unwrap();
        let worst: f64 = commutator_oracle_sweep(&mut rng(31), 2, 2, &c).unwrap();
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn similarity_sweep_two_modes() {
        let c = FockCutoff::new(2, 3).unwrap();
        let worst: f64 = similarity_oracle_sweep(&mut rng(32), 2, 1, 0.5, &c).unwrap();
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn round_trip_two_modes() {
        let spec = random_spec::<f64>(&mut rng(33), 2, 0.8);
        let (s, r) = round_trip_residuals(&spec, &FockCutoff::new(2, 4).unwrap()).unwrap();
        assert!(s < 1e-12 && r < 1e-8, "{s} {r}");
    }
}
