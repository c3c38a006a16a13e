use lindblad_core::fock::{
    exact_trajectory, expr_trajectory, heisenberg_trajectory, linear_trajectory, zero_order_trajectory, Propagated,
    DEFAULT_LEAK_TOLERANCE,
};
use lindblad_core::identities::{run_identity_suite, SuiteOptions};
use lindblad_core::spectrum::{full_spectrum, match_multisets, zero_order_oracle_eigenvalues};
use lindblad_core::{build_liouvillian, DensityMatrixF64, SystemSpecF64};

use crate::config::{Command, Method, RunConfig};
use crate::error::CliError;
use crate::report::{
    Check, Cplx, ElementValue, EvolvePoint, EvolveReport, ExpectPoint, ExpectReport, Report, Sci, SpectrumReport,
    SpectrumRow, VerifyReport,
};

/// Bound on the union-versus-oracle eigenvalue mismatch.
pub const SPECTRUM_TOLERANCE: f64 = 1e-8;
/// Bound on the trace distance between an approximate method and exact propagation.
pub const METHOD_GAP_TOLERANCE: f64 = 1e-2;
/// Bound on the Schrödinger-versus-Heisenberg expectation gap.
pub const DUALITY_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub verify: bool,
    pub tolerance: Option<f64>,
}

impl Options {
    fn tolerance_or(&self, config: &RunConfig, default: f64) -> f64 {
        self.tolerance.or(config.tolerance).unwrap_or(default)
    }
}

pub fn run(command: Command, config: &RunConfig, options: &Options) -> Result<Report, CliError> {
    if let Some(requested) = config.command {
        if requested != command {
            return Err(CliError::InvalidConfig(format!(
                "config names command {} but {} was invoked",
                requested.name(),
                command.name()
            )));
        }
    }
    if let Some(t) = options.tolerance.or(config.tolerance) {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::InvalidConfig(format!("tolerance must be positive, got {t}")));
        }
    }
    match command {
        Command::Spectrum => run_spectrum(config, options),
        Command::Evolve => run_evolve(config, options),
        Command::Expect => run_expect(config, options),
        Command::Verify => run_verify(config, options),
    }
}

pub fn run_spectrum(config: &RunConfig, options: &Options) -> Result<Report, CliError> {
    let spec = config.system_spec()?;
    if spec.mode_count() != 2 {
        return Err(CliError::InvalidConfig(format!(
            "spectrum needs exactly two modes, got {}",
            spec.mode_count()
        )));
    }
    let max_total = config.max_total.unwrap_or(config.cutoff);
    let sectors = full_spectrum(&spec, max_total)?;
    let rows = sectors
        .iter()
        .flat_map(|(s, values)| {
            values.iter().enumerate().map(move |(k, &z)| SpectrumRow {
                u: s.u,
                v: s.v,
                k,
                lambda: Cplx::new(z),
            })
        })
        .collect();
    let verification = if options.verify {
        let union: Vec<_> = sectors.values().flatten().copied().collect();
        let oracle = zero_order_oracle_eigenvalues(&spec, max_total)?;
        let mismatch = match_multisets(&union, &oracle).unwrap_or(f64::INFINITY);
        Some(Check::new(
            "spectrum_oracle_union",
            mismatch,
            options.tolerance_or(config, SPECTRUM_TOLERANCE),
        ))
    } else {
        None
    };
    Ok(Report::Spectrum(SpectrumReport {
        modes: 2,
        max_total,
        rows,
        verification,
    }))
}

fn trajectory(
    config: &RunConfig,
    method: Method,
    spec: &SystemSpecF64,
    rho0: &DensityMatrixF64,
    times: &[f64],
) -> Result<Vec<Propagated<f64>>, CliError> {
    let leak = config.leak_tolerance.unwrap_or(DEFAULT_LEAK_TOLERANCE);
    Ok(match method {
        Method::Exact => exact_trajectory(spec, rho0, times, leak)?,
        Method::ZeroOrder => zero_order_trajectory(spec, rho0, times)?,
        Method::Linear => linear_trajectory(spec, rho0, times)?,
    })
}

pub fn run_evolve(config: &RunConfig, options: &Options) -> Result<Report, CliError> {
    let spec = config.system_spec()?;
    let cutoff = config.fock_cutoff()?;
    let rho0 = config.initial_density(cutoff)?;
    let times = config.validated_times()?;
    let elements = config.element_indices(cutoff)?;
    let path = trajectory(config, config.method, &spec, &rho0, &times)?;
    let points = path
        .iter()
        .map(|p| EvolvePoint {
            t: Sci(p.time),
            trace: Cplx::new(p.rho.trace()),
            purity: Sci(p.rho.purity()),
            trace_drift: Sci(p.trace_drift),
            leaked: p.leaked,
            populations: p.rho.populations().into_iter().map(Sci).collect(),
            mean_occupation: (0..cutoff.mode_count()).map(|k| Sci(p.rho.mean_occupation(k))).collect(),
            elements: elements
                .iter()
                .map(|&(i, j)| ElementValue {
                    ket: cutoff.occupation(i),
                    bra: cutoff.occupation(j),
                    value: Cplx::new(p.rho.matrix()[(i, j)]),
                })
                .collect(),
        })
        .collect();
    let verification = if !options.verify {
        None
    } else if config.method == Method::Exact {
        let drift = path.iter().fold(0.0_f64, |acc, p| acc.max(p.trace_drift));
        let leak = config.leak_tolerance.unwrap_or(DEFAULT_LEAK_TOLERANCE);
        Some(Check::new("trace_drift", drift, options.tolerance.unwrap_or(leak)))
    } else {
        let exact = trajectory(config, Method::Exact, &spec, &rho0, &times)?;
        let gap = path
            .iter()
            .zip(&exact)
            .map(|(a, b)| a.rho.trace_distance(&b.rho))
            .collect::<Result<Vec<f64>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Some(Check::new(
            "exact_trace_distance",
            gap,
            options.tolerance_or(config, METHOD_GAP_TOLERANCE),
        ))
    };
    Ok(Report::Evolve(EvolveReport {
        method: config.method.name(),
        cutoff: cutoff.per_mode_max(),
        basis: (0..cutoff.dim()).map(|i| cutoff.occupation(i)).collect(),
        points,
        verification,
    }))
}

pub fn run_expect(config: &RunConfig, options: &Options) -> Result<Report, CliError> {
    let spec = config.system_spec()?;
    let cutoff = config.fock_cutoff()?;
    let rho0 = config.initial_density(cutoff)?;
    let times = config.validated_times()?;
    let observable = config.observable_matrix(cutoff)?;
    let path = trajectory(config, config.method, &spec, &rho0, &times)?;
    let values = path
        .iter()
        .map(|p| p.rho.expectation(&observable))
        .collect::<Result<Vec<_>, _>>()?;
    let verification = if options.verify {
        // both pictures on the represented algebraic form, so truncation cancels
        let leak = config.leak_tolerance.unwrap_or(DEFAULT_LEAK_TOLERANCE);
        let schroedinger = expr_trajectory(&build_liouvillian(&spec), &rho0, &times, leak)?
            .iter()
            .map(|p| p.rho.expectation(&observable))
            .collect::<Result<Vec<_>, _>>()?;
        let heisenberg = heisenberg_trajectory(&spec, &observable, &rho0, &times)?;
        let gap = schroedinger
            .iter()
            .zip(&heisenberg)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()));
        Some(Check::new(
            "heisenberg_duality",
            gap,
            options.tolerance_or(config, DUALITY_TOLERANCE),
        ))
    } else {
        None
    };
    Ok(Report::Expect(ExpectReport {
        method: config.method.name(),
        cutoff: cutoff.per_mode_max(),
        points: path
            .iter()
            .zip(values)
            .map(|(p, z)| ExpectPoint {
                t: Sci(p.time),
                value: Cplx::new(z),
                leaked: p.leaked,
            })
            .collect(),
        verification,
    }))
}

pub fn run_verify(config: &RunConfig, options: &Options) -> Result<Report, CliError> {
    let spec = config.system_spec()?;
    config.fock_cutoff()?;
    let seed = config.seed.unwrap_or(DEFAULT_SEED);
    let suite = SuiteOptions {
        cutoff: config.cutoff,
        seed,
        tolerance_override: options.tolerance.or(config.tolerance),
        ..SuiteOptions::default()
    };
    let checks: Vec<Check> = run_identity_suite(&spec, &suite)?
        .into_iter()
        .map(|c| Check::new(c.name, c.residual, c.tolerance))
        .collect();
    Ok(Report::Verify(VerifyReport {
        modes: spec.mode_count(),
        cutoff: config.cutoff,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }))
}
