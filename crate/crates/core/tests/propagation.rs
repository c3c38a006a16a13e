use lindblad_core::fock::{
    bilinear_form, evolution_matrix_u, exact_propagate, exact_trajectory, expr_trajectory, heisenberg_trajectory,
    linear_propagate, linear_trajectory, mode_operators, zero_order_trajectory, DEFAULT_LEAK_TOLERANCE,
};
use lindblad_core::sample::{random_density_matrix, random_spec, rng};
use lindblad_core::{
    build_liouvillian, CoeffMatrixF64, Complex64, DensityMatrixF64, Error, FockCutoff, SystemSpecF64,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

const TIMES: [f64; 5] = [0.0, 0.3, 1.0, 2.5, 6.0];

fn decoupled(omega: &[f64], gamma: &[f64], n_thermal: f64) -> SystemSpecF64 {
    SystemSpecF64::new(
        CoeffMatrixF64::from_real_diagonal(omega),
        CoeffMatrixF64::from_real_diagonal(gamma),
        n_thermal,
    )
    .unwrap()
}

/// Random state holding at most `photons` photons in total.
fn shell_state(seed: u64, cutoff: FockCutoff, photons: usize) -> DensityMatrixF64 {
    let support = cutoff.states_with_total_at_most(photons);
    let block = random_density_matrix::<f64>(&mut rng(seed), support.len());
    let mut full = DMatrix::zeros(cutoff.dim(), cutoff.dim());
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            full[(i, j)] = block[(a, b)];
        }
    }
    DensityMatrixF64::from_matrix(cutoff, full).unwrap()
}

#[test]
fn fock_state_decays_exponentially_at_zero_temperature() {
    let gamma = 0.4;
    let spec = SystemSpecF64::single_mode(1.3, gamma, 0.0).unwrap();
    let cutoff = FockCutoff::new(1, 4).unwrap();
    let rho = DensityMatrixF64::fock(cutoff, &[4]).unwrap();
    for p in exact_trajectory(&spec, &rho, &TIMES, DEFAULT_LEAK_TOLERANCE).unwrap() {
        let expected = 4.0 * (-gamma * p.time).exp();
        assert!((p.rho.mean_occupation(0) - expected).abs() < 1e-8, "t = {}", p.time);
        assert!(!p.leaked);
    }
}

#[test]
fn bell_coherence_decays_at_the_damping_rate() {
    let gamma = 0.7;
    let spec = decoupled(&[0.0, 0.0], &[gamma, gamma], 0.0);
    let cutoff = FockCutoff::new(2, 1).unwrap();
    let rho = DensityMatrixF64::bell_01_10(cutoff).unwrap();
    let ket = cutoff.index_of(&[0, 1]).unwrap();
    let bra = cutoff.index_of(&[1, 0]).unwrap();
    for p in exact_trajectory(&spec, &rho, &TIMES, DEFAULT_LEAK_TOLERANCE).unwrap() {
        let expected = 0.5 * (-gamma * p.time).exp();
        assert!((p.rho.matrix()[(ket, bra)] - Complex64::new(expected, 0.0)).norm() < 1e-10);
    }
}

#[test]
fn thermal_mode_relaxes_to_bath_occupation() {
    let (gamma, n_thermal) = (0.5, 0.3);
    let spec = SystemSpecF64::single_mode(0.8, gamma, n_thermal).unwrap();
    let cutoff = FockCutoff::new(1, 24).unwrap();
    let rho = DensityMatrixF64::fock(cutoff, &[2]).unwrap();
    for p in exact_trajectory(&spec, &rho, &TIMES, DEFAULT_LEAK_TOLERANCE).unwrap() {
        let decay = (-gamma * p.time).exp();
        let expected = 2.0 * decay + n_thermal * (1.0 - decay);
        assert!((p.rho.mean_occupation(0) - expected).abs() < 1e-8, "t = {}", p.time);
    }
}

#[test]
fn truncated_thermal_state_does_not_move() {
    let spec = SystemSpecF64::single_mode(1.0, 0.3, 0.4).unwrap();
    let cutoff = FockCutoff::new(1, 10).unwrap();
    let rho = DensityMatrixF64::thermal(cutoff, 0.4).unwrap();
    let later = exact_propagate(&spec, &rho, 5.0).unwrap();
    assert!((later.rho.matrix() - rho.matrix()).camax() < 1e-12);
}

#[test]
fn zero_order_is_exact_at_zero_temperature() {
    let spec: SystemSpecF64 = random_spec(&mut rng(11), 2, 0.0);
    let cutoff = FockCutoff::new(2, 3).unwrap();
    let rho = shell_state(12, cutoff, 3);
    let exact = exact_trajectory(&spec, &rho, &TIMES, DEFAULT_LEAK_TOLERANCE).unwrap();
    let zero = zero_order_trajectory(&spec, &rho, &TIMES).unwrap();
    for (a, b) in exact.iter().zip(&zero) {
        assert!((a.rho.matrix() - b.rho.matrix()).camax() < 1e-12);
    }
}

#[test]
fn linear_reduces_to_zero_order_without_thermal_photons() {
    let spec: SystemSpecF64 = random_spec(&mut rng(21), 2, 0.0);
    let cutoff = FockCutoff::new(2, 3).unwrap();
    let rho = shell_state(22, cutoff, 2);
    let linear = linear_trajectory(&spec, &rho, &TIMES).unwrap();
    let zero = zero_order_trajectory(&spec, &rho, &TIMES).unwrap();
    for (a, b) in linear.iter().zip(&zero) {
        assert!((a.rho.matrix() - b.rho.matrix()).camax() < 1e-14);
    }
}

#[test]
fn linear_is_identity_at_time_zero() {
    let spec: SystemSpecF64 = random_spec(&mut rng(31), 2, 0.2);
    let cutoff = FockCutoff::new(2, 3).unwrap();
    let rho = shell_state(32, cutoff, 2);
    let p = linear_propagate(&spec, &rho, 0.0).unwrap();
    assert!((p.rho.matrix() - rho.matrix()).camax() < 1e-15);
}

#[test]
fn linear_needs_room_for_one_more_photon() {
    let spec: SystemSpecF64 = random_spec(&mut rng(41), 2, 0.2);
    let cutoff = FockCutoff::new(2, 2).unwrap();
    let pair = DensityMatrixF64::fock(cutoff, &[1, 1]).unwrap();
    let err = linear_propagate(&spec, &pair, 0.5).unwrap_err();
    assert!(matches!(err, Error::MissingSpareLevel { photons: 2, needed: 3, cutoff: 2 }));
    let single = DensityMatrixF64::fock(cutoff, &[0, 1]).unwrap();
    assert!(linear_propagate(&spec, &single, 0.5).is_ok());
}

#[test]
fn evolution_matrix_is_exponential_decay_when_damping_commutes() {
    let gamma = [0.3, 0.9];
    let spec = decoupled(&[1.0, -2.0], &gamma, 0.1);
    let t = 1.7;
    let u = evolution_matrix_u(&spec, t).unwrap().u_of_t;
    let expected = CoeffMatrixF64::from_real_diagonal(&gamma.map(|g| (-g * t).exp()));
    assert!(u.max_abs_diff(&expected) < 1e-13);
}

#[test]
fn evolution_matrix_contracts() {
    let mut r = rng(51);
    for _ in 0..20 {
        let spec: SystemSpecF64 = random_spec(&mut r, 3, 0.1);
        let u = evolution_matrix_u(&spec, 0.8).unwrap().u_of_t;
        assert!(u.spectral_norm() <= 1.0 + 1e-12);
        assert!(u.hermiticity_deviation() < 1e-12);
    }
}

#[test]
fn identity_observable_stays_one() {
    let spec: SystemSpecF64 = random_spec(&mut rng(61), 2, 0.0);
    let cutoff = FockCutoff::new(2, 3).unwrap();
    let rho = shell_state(62, cutoff, 3);
    let identity = DMatrix::identity(cutoff.dim(), cutoff.dim());
    for z in heisenberg_trajectory(&spec, &identity, &rho, &TIMES).unwrap() {
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn hopping_expectation_agrees_in_both_pictures() {
    let spec: SystemSpecF64 = random_spec(&mut rng(71), 2, 0.25);
    let cutoff = FockCutoff::new(2, 4).unwrap();
    let rho = shell_state(72, cutoff, 2);
    let hop = CoeffMatrixF64::from_fn(2, |n, m| Complex64::new(f64::from(u8::from(n == 0 && m == 1)), 0.0));
    let observable = bilinear_form(&mode_operators(&cutoff), &hop).to_dense();
    let heisenberg = heisenberg_trajectory(&spec, &observable, &rho, &TIMES).unwrap();
    let schroedinger = expr_trajectory(&build_liouvillian(&spec), &rho, &TIMES, 1.0).unwrap();
    for (p, h) in schroedinger.iter().zip(heisenberg) {
        assert!((p.rho.expectation(&observable).unwrap() - h).norm() < 1e-10);
    }
}

#[test]
fn rejects_descending_times() {
    let spec = SystemSpecF64::single_mode(1.0, 0.2, 0.0).unwrap();
    let rho = DensityMatrixF64::fock(FockCutoff::new(1, 2).unwrap(), &[1]).unwrap();
    assert!(matches!(
        zero_order_trajectory(&spec, &rho, &[1.0, 0.5]),
        Err(Error::TimesNotAscending { .. })
    ));
    assert!(matches!(exact_propagate(&spec, &rho, f64::NAN), Err(Error::InvalidTime(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_propagation_yields_density_matrices(seed in 0u64..10_000, n_thermal in 0.0f64..0.6, t in 0.0f64..4.0) {
        let spec: SystemSpecF64 = random_spec(&mut rng(seed), 2, n_thermal);
        let cutoff = FockCutoff::new(2, 3).unwrap();
        let rho = shell_state(seed + 1, cutoff, 3);
        let p = exact_propagate(&spec, &rho, t).unwrap();
        prop_assert!(p.trace_drift < 1e-10);
        prop_assert!(p.rho.hermiticity_deviation() < 1e-10);
        prop_assert!(p.rho.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn zero_order_preserves_trace(seed in 0u64..10_000, n_thermal in 0.0f64..2.0, t in 0.0f64..10.0) {
        let spec: SystemSpecF64 = random_spec(&mut rng(seed), 2, n_thermal);
        let cutoff = FockCutoff::new(2, 2).unwrap();
        let rho = shell_state(seed + 1, cutoff, 2);
        let p = zero_order_trajectory(&spec, &rho, &[t]).unwrap().remove(0);
        prop_assert!(p.trace_drift < 1e-12);
    }
}
