//! Acceptance gate. Runs every criterion at its stated tolerance and time
//! budget, prints one PASS/FAIL line per criterion, exits nonzero on failure.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use lindblad_core::fock::{
    exact_trajectory, linear_propagate, mode_operators, represent, unvectorize, vectorize, zero_order_trajectory,
    DEFAULT_LEAK_TOLERANCE,
};
use lindblad_core::identities::{
    appendix_d_residuals, commutator_oracle_sweep, duality_residual, factorization_residual, interior_block,
    FACTORIZATION_TIME,
};
use lindblad_core::sample::{random_density_matrix, random_operator, random_spec, rng, SampleRng};
use lindblad_core::spectrum::{full_spectrum, match_multisets, zero_order_oracle_eigenvalues, SectorIndex};
use lindblad_core::{
    build_liouvillian, conjugate, diagonalize, Complex64, DensityMatrix, Error, FockCutoff,
    GeneratorKind, SystemSpecF64,
};
use nalgebra::DMatrix;
use rand::Rng;

type Outcome = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn verdict(ok: bool, detail: String) -> Outcome {
    Ok((ok, detail))
}

fn algebra_closure() -> Outcome {
    let cutoff = FockCutoff::new(2, 4).map_err(|e| e.to_string())?;
    let worst: f64 = commutator_oracle_sweep(&mut rng(101), 2, 50, &cutoff).map_err(|e| e.to_string())?;
    verdict(worst < 1e-9, format!("max interior error {worst:.3e} over 50 pairs x 16 family pairs (< 1e-9)"))
}

fn riccati_diagonalization() -> Outcome {
    let mut r = rng(202);
    let (mut worst_r, mut worst_z, mut stray) = (0.0_f64, 0.0_f64, 0);
    for i in 0..100 {
        let modes = 1 + i % 4;
        let n_thermal = r.random_range(0.0..=5.0);
        let spec: SystemSpecF64 = random_spec(&mut r, modes, n_thermal);
        let d = diagonalize(&spec).map_err(|e| format!("spec {i}: {e}"))?;
        worst_r = worst_r.max(d.residual_r);
        worst_z = worst_z.max(d.residual_z);
        if d.l_diag.contains(GeneratorKind::KPlus) || d.l_diag.contains(GeneratorKind::KMinus) {
            stray += 1;
        }
    }
    verdict(
        worst_r < 1e-12 && worst_z < 1e-12 && stray == 0,
        format!("max |R| {worst_r:.3e}, max |Z| {worst_z:.3e} (< 1e-12), raising/lowering terms left in {stray} of 100"),
    )
}

fn spectrum_correctness() -> Outcome {
    let mut r = rng(303);
    let (mut worst_match, mut worst_zero, mut worst_re, mut worst_shift) = (0.0_f64, 0.0_f64, f64::MIN, 0.0_f64);
    for i in 0..20 {
        let n_thermal = r.random_range(0.0..=2.0);
        let spec: SystemSpecF64 = random_spec(&mut r, 2, n_thermal);
        let sectors = full_spectrum(&spec, 4).map_err(|e| e.to_string())?;
        let union: Vec<Complex64> = sectors.values().flatten().copied().collect();
        let oracle = zero_order_oracle_eigenvalues(&spec, 4).map_err(|e| e.to_string())?;
        let mismatch = match_multisets(&union, &oracle).ok_or(format!("spec {i}: multiset sizes differ"))?;
        worst_match = worst_match.max(mismatch);

        let ground = &sectors[&SectorIndex::new(0, 0)];
        let (zero_at, zero) = ground
            .iter()
            .enumerate()
            .map(|(k, z)| (k, z.norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or("empty ground sector")?;
        worst_zero = worst_zero.max(zero);
        for (s, values) in &sectors {
            for (k, z) in values.iter().enumerate() {
                if !(s.u == 0 && s.v == 0 && k == zero_at) {
                    worst_re = worst_re.max(z.re);
                }
            }
        }

        let shifted = spec.with_thermal(spec.n_thermal() + 1.7).map_err(|e| e.to_string())?;
        let moved: Vec<Complex64> = full_spectrum(&shifted, 4)
            .map_err(|e| e.to_string())?
            .values()
            .flatten()
            .copied()
            .collect();
        worst_shift = worst_shift.max(match_multisets(&union, &moved).unwrap_or(f64::INFINITY));
    }
    verdict(
        worst_match < 1e-8 && worst_zero < 1e-10 && worst_re <= 1e-10 && worst_shift < 1e-8,
        format!(
            "union vs oracle {worst_match:.3e} (< 1e-8), |lambda_0| {worst_zero:.3e}, max other Re {worst_re:.3e} (<= 1e-10), n_T shift {worst_shift:.3e}"
        ),
    )
}

fn thermalization() -> Outcome {
    let (omega, gamma, n_thermal, n0) = (1.0, 0.4, 0.5, 3);
    let spec = SystemSpecF64::single_mode(omega, gamma, n_thermal).map_err(|e| e.to_string())?;
    let cutoff = FockCutoff::new(1, 16).map_err(|e| e.to_string())?;
    let ops = mode_operators::<f64>(&cutoff);
    let number = ops.creation[0].matmul(&ops.annihilation[0]).to_dense();

    // equation of motion read off the conjugate generator: L+(n) = -g n + g n_T
    let dual = represent(&conjugate(&build_liouvillian(&spec)), &cutoff).map_err(|e| e.to_string())?;
    let moved = unvectorize(&dual.apply_vec(&vectorize(&number)), cutoff.dim());
    let expected = number.map(|z| z * -gamma) + DMatrix::<Complex64>::identity(cutoff.dim(), cutoff.dim()) * Complex64::new(gamma * n_thermal, 0.0);
    let interior = cutoff.interior_states(1);
    let eom = interior
        .iter()
        .flat_map(|&i| interior.iter().map(move |&j| (i, j)))
        .fold(0.0_f64, |acc, (i, j)| acc.max((moved[(i, j)] - expected[(i, j)]).norm()));

    let times: Vec<f64> = (0..20).map(|k| 5.0 / gamma * k as f64 / 19.0).collect();
    let rho0 = DensityMatrix::fock(cutoff, &[n0]).map_err(|e| e.to_string())?;
    let path = exact_trajectory(&spec, &rho0, &times, DEFAULT_LEAK_TOLERANCE).map_err(|e| e.to_string())?;
    let worst = path.iter().fold(0.0_f64, |acc, p| {
        let closed = n_thermal + (n0 as f64 - n_thermal) * (-gamma * p.time).exp();
        acc.max((p.rho.mean_occupation(0) - closed).abs())
    });
    verdict(
        worst < 1e-6 && eom < 1e-12,
        format!("max |<n> - closed form| {worst:.3e} over 20 points (< 1e-6), equation-of-motion residual {eom:.3e}"),
    )
}

fn linear_order() -> Outcome {
    let base: SystemSpecF64 = random_spec(&mut rng(505), 2, 0.0);
    let t = 1.0 / base.gamma().spectral_norm();
    let cutoff = FockCutoff::new(2, 8).map_err(|e| e.to_string())?;
    let rho0 = DensityMatrix::fock(cutoff, &[0, 1]).map_err(|e| e.to_string())?;
    let error = |n: f64| -> Result<f64, String> {
        let spec = base.with_thermal(n).map_err(|e| e.to_string())?;
        let exact = exact_trajectory(&spec, &rho0, &[t], DEFAULT_LEAK_TOLERANCE).map_err(|e| e.to_string())?;
        let approx = linear_propagate(&spec, &rho0, t).map_err(|e| e.to_string())?;
        approx.rho.trace_distance(&exact[0].rho).map_err(|e| e.to_string())
    };
    let (e2, e1) = (error(0.02)?, error(0.01)?);
    let ratio = e2 / e1;
    verdict(
        (3.5..=4.5).contains(&ratio),
        format!("error(0.02) {e2:.3e}, error(0.01) {e1:.3e}, ratio {ratio:.4} (in [3.5, 4.5])"),
    )
}

fn zero_order_truncatability() -> Outcome {
    let mut r = rng(606);
    let spec: SystemSpecF64 = random_spec(&mut r, 2, 0.3);
    let times = [0.0, 0.5, 1.0, 3.0, 10.0];
    let mut drift = 0.0_f64;
    let mut cutoff_gap = 0.0_f64;
    for top in [1usize, 2] {
        // random state holding at most `top` photons in total
        let minimal = FockCutoff::new(2, top).map_err(|e| e.to_string())?;
        let support = minimal.states_with_total_at_most(top);
        let block = random_density_matrix::<f64>(&mut r, support.len());
        let mut full = DMatrix::zeros(minimal.dim(), minimal.dim());
        for (a, &i) in support.iter().enumerate() {
            for (b, &j) in support.iter().enumerate() {
                full[(i, j)] = block[(a, b)];
            }
        }
        let rho = DensityMatrix::from_matrix(minimal, full).map_err(|e| e.to_string())?;
        let path = zero_order_trajectory(&spec, &rho, &times).map_err(|e| e.to_string())?;
        drift = path.iter().fold(drift, |acc, p| acc.max(p.trace_drift));
        // the same state on a larger space evolves identically
        let larger = FockCutoff::new(2, top + 2).map_err(|e| e.to_string())?;
        let wide = zero_order_trajectory(&spec, &rho.embed(larger).map_err(|e| e.to_string())?, &times)
            .map_err(|e| e.to_string())?;
        for (a, b) in path.iter().zip(&wide) {
            let back = b.rho.restrict(minimal).map_err(|e| e.to_string())?;
            cutoff_gap = cutoff_gap.max((a.rho.matrix() - back.matrix()).camax());
        }
    }

    let bell_at = |n: usize| -> Result<DensityMatrix<f64>, String> {
        DensityMatrix::bell_01_10(FockCutoff::new(2, n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    };
    let t = 0.7;
    let pair = DensityMatrix::fock(FockCutoff::new(2, 2).map_err(|e| e.to_string())?, &[1, 1]).map_err(|e| e.to_string())?;
    let refused = [bell_at(1)?, pair]
        .iter()
        .all(|rho| matches!(linear_propagate(&spec, rho, t), Err(Error::MissingSpareLevel { .. })));
    let one_spare = linear_propagate(&spec, &bell_at(2)?, t).map_err(|e| e.to_string())?;
    let two_spare = linear_propagate(&spec, &bell_at(3)?, t).map_err(|e| e.to_string())?;
    let back = two_spare
        .rho
        .restrict(*one_spare.rho.cutoff())
        .map_err(|e| e.to_string())?;
    let spare_gap = (one_spare.rho.matrix() - back.matrix()).camax();
    let ok = drift < 1e-12 && cutoff_gap < 1e-12 && refused && spare_gap < 1e-12 && one_spare.trace_drift < 1e-12;
    verdict(
        ok,
        format!(
            "zero-order drift {drift:.3e} (< 1e-12), cutoff independence {cutoff_gap:.3e}, linear refused without spare level: {refused}, one vs two spare levels {spare_gap:.3e}"
        ),
    )
}

fn factorization_suite() -> Outcome {
    let mut r = rng(707);
    let cutoff_for = |m: usize| FockCutoff::new(m, 5).map_err(|e| e.to_string());
    let mut worst_fact = 0.0_f64;
    let mut worst_d = [0.0_f64; 4];
    for (modes, n_thermal) in [(1, 0.5), (1, 0.1), (2, 0.5), (2, 0.25), (2, 0.05)] {
        let spec: SystemSpecF64 = random_spec(&mut r, modes, n_thermal);
        let g = spec.gamma().spectral_norm();
        let cutoff = cutoff_for(modes)?;
        let f = factorization_residual(&spec, &cutoff, 1, FACTORIZATION_TIME / g).map_err(|e| e.to_string())?;
        worst_fact = worst_fact.max(f);
        let d = appendix_d_residuals(&spec, &cutoff, 1.0 / g).map_err(|e| e.to_string())?;
        for (w, x) in worst_d.iter_mut().zip(d) {
            *w = w.max(x);
        }
    }
    let ok = worst_fact < 1e-6 && worst_d.iter().all(|&x| x < 1e-6);
    verdict(
        ok,
        format!(
            "factorization {worst_fact:.3e}, conjugation identities [{:.2e}, {:.2e}, {:.2e}, {:.2e}] (< 1e-6)",
            worst_d[0], worst_d[1], worst_d[2], worst_d[3]
        ),
    )
}

fn heisenberg_duality() -> Outcome {
    let mut r: SampleRng = rng(808);
    let spec: SystemSpecF64 = random_spec(&mut r, 2, 0.4);
    let cutoff = FockCutoff::new(2, 4).map_err(|e| e.to_string())?;
    let rho = DensityMatrix::from_matrix(cutoff, random_density_matrix::<f64>(&mut r, cutoff.dim()))
        .map_err(|e| e.to_string())?;
    let observables: Vec<_> = (0..10).map(|_| random_operator::<f64>(&mut r, cutoff.dim())).collect();
    let g = spec.gamma().spectral_norm();
    let times = [0.3 / g, 1.0 / g, 3.0 / g];
    let worst = duality_residual(&spec, &rho, &observables, &times).map_err(|e| e.to_string())?;
    let interior_ok = !interior_block(&cutoff, 1).is_empty();
    verdict(
        worst < 1e-9 && interior_ok,
        format!("max |Schroedinger - Heisenberg| {worst:.3e} over 10 observables x 3 times (< 1e-9)"),
    )
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cli_round_trip() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lindblad");
    let reference = configs_dir().join("reference.json");
    let run = |config: &PathBuf| {
        Command::new(bin)
            .args(["verify", "--config"])
            .arg(config)
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run(&reference)?;
    let second = run(&reference)?;
    let identical = first.stdout == second.stdout && !first.stdout.is_empty();
    let reference_ok = first.status.code() == Some(0) && second.status.code() == Some(0);

    let text = std::fs::read_to_string(&reference).map_err(|e| e.to_string())?;
    let mut json: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    json["spec"] = serde_json::json!({
        "modes": 2,
        "omega": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
        "gamma": [[[0.2, 0.0], [0.05, 0.01]], [[0.07, -0.01], [0.2, 0.0]]],
        "n_thermal": 0.1
    });
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corrupted = dir.path().join("corrupted.json");
    std::fs::write(&corrupted, json.to_string()).map_err(|e| e.to_string())?;
    let bad = run(&corrupted)?;
    let stderr = String::from_utf8_lossy(&bad.stderr);
    let line = stderr.lines().next().unwrap_or_default().to_string();
    let rejected = bad.status.code().is_some_and(|c| c != 0)
        && line.starts_with("error:")
        && line.contains("gamma_not_hermitian")
        && bad.stdout.is_empty();
    verdict(
        reference_ok && identical && rejected,
        format!(
            "reference exit {:?}, byte-identical JSON: {identical}, corrupted exit {:?} with `{line}`",
            first.status.code(),
            bad.status.code()
        ),
    )
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "algebra closure vs Fock oracle", budget: Duration::from_secs(30), run: algebra_closure },
        Criterion { id: 2, name: "Riccati residuals and diagonal form", budget: Duration::from_secs(5), run: riccati_diagonalization },
        Criterion { id: 3, name: "sector spectrum vs oracle", budget: Duration::from_secs(60), run: spectrum_correctness },
        Criterion { id: 4, name: "thermalization closed form", budget: Duration::from_secs(20), run: thermalization },
        Criterion { id: 5, name: "linear propagator error order", budget: Duration::from_secs(60), run: linear_order },
        Criterion { id: 6, name: "zero-order truncatability and spare level", budget: Duration::from_secs(5), run: zero_order_truncatability },
        Criterion { id: 7, name: "factorization and conjugation identities", budget: Duration::from_secs(60), run: factorization_suite },
        Criterion { id: 8, name: "Heisenberg duality", budget: Duration::from_secs(30), run: heisenberg_duality },
        Criterion { id: 9, name: "CLI determinism and rejection", budget: Duration::from_secs(10), run: cli_round_trip },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= c.budget;
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {} ({}): {}; {:.2} s (budget {} s)",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
