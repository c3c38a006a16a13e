//! JSON run configuration.

use std::path::{Path, PathBuf};

use lindblad_core::fock::{bilinear_form, mode_operators};
use lindblad_core::{CoeffMatrix, Complex64, DensityMatrix, FockCutoff, SpecViolation, SystemSpec};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Spectrum,
    Evolve,
    Expect,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Evolve => "evolve",
            Self::Expect => "expect",
            Self::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Exact,
    ZeroOrder,
    Linear,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::ZeroOrder => "zero_order",
            Self::Linear => "linear",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// `[re, im]`.
pub type ComplexPair = [f64; 2];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub modes: usize,
    pub omega: Vec<Vec<ComplexPair>>,
    pub gamma: Vec<Vec<ComplexPair>>,
    pub n_thermal: f64,
}

/// One density-matrix or operator entry `<ket| X |bra>` addressed by
/// occupation numbers.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntry {
    pub ket: Vec<usize>,
    pub bra: Vec<usize>,
    pub value: ComplexPair,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Fock { occupation: Vec<usize> },
    #[serde(rename = "bell_01_10")]
    Bell0110,
    Thermal { n_mean: f64 },
    Explicit { entries: Vec<MatrixEntry> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    /// `a+_mode a_mode`.
    Number { mode: usize },
    /// `sum_nm C_nm a+_n a_m`.
    Bilinear { coefficients: Vec<Vec<ComplexPair>> },
    Explicit { entries: Vec<MatrixEntry> },
}

/// Requested matrix element `<ket| rho |bra>`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementRequest {
    pub ket: Vec<usize>,
    pub bra: Vec<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub spec: SpecConfig,
    pub cutoff: usize,
    pub initial_state: Option<InitialState>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub method: Method,
    pub observable: Option<Observable>,
    pub max_total: Option<usize>,
    #[serde(default)]
    pub elements: Vec<ElementRequest>,
    pub tolerance: Option<f64>,
    pub leak_tolerance: Option<f64>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidConfig(msg.into())
}

fn complex(p: ComplexPair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn coeff_matrix(name: &'static str, rows: &[Vec<ComplexPair>], modes: usize) -> Result<CoeffMatrix<f64>, CliError> {
    let shape = || SpecViolation::Shape {
        name,
        expected: modes,
        rows: rows.len(),
        cols: rows.first().map_or(0, Vec::len),
    };
    if rows.len() != modes || rows.iter().any(|r| r.len() != modes) {
        return Err(shape().into());
    }
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().copied().map(complex).collect()).collect();
    Ok(CoeffMatrix::from_rows(&rows)?)
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn system_spec(&self) -> Result<SystemSpec<f64>, CliError> {
        let s = &self.spec;
        if s.modes == 0 {
            return Err(SpecViolation::NoModes.into());
        }
        let omega = coeff_matrix("omega", &s.omega, s.modes)?;
        let gamma = coeff_matrix("gamma", &s.gamma, s.modes)?;
        Ok(SystemSpec::new(omega, gamma, s.n_thermal)?)
    }

    pub fn fock_cutoff(&self) -> Result<FockCutoff, CliError> {
        Ok(FockCutoff::new(self.spec.modes, self.cutoff)?)
    }

    pub fn validated_times(&self) -> Result<Vec<f64>, CliError> {
        if self.times.is_empty() {
            return Err(invalid("times must not be empty"));
        }
        for (i, &t) in self.times.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(invalid(format!("times[{i}] = {t} must be finite and non-negative")));
            }
            if i > 0 && t <= self.times[i - 1] {
                return Err(invalid(format!("times must be strictly ascending at index {i}")));
            }
        }
        Ok(self.times.clone())
    }

    /// Initial state on the configured cutoff. Checks that the cutoff holds
    /// the state, plus one spare photon for the linear method.
    pub fn initial_density(&self, cutoff: FockCutoff) -> Result<DensityMatrix<f64>, CliError> {
        let state = self
            .initial_state
            .as_ref()
            .ok_or_else(|| invalid("initial_state is required for this command"))?;
        let rho = match state {
            InitialState::Fock { occupation } => {
                if occupation.len() != cutoff.mode_count() {
                    return Err(invalid(format!(
                        "fock occupation has {} entries for {} modes",
                        occupation.len(),
                        cutoff.mode_count()
                    )));
                }
                if let Some(&k) = occupation.iter().find(|&&k| k > cutoff.per_mode_max()) {
                    return Err(invalid(format!("occupation {k} exceeds cutoff {}", cutoff.per_mode_max())));
                }
                DensityMatrix::fock(cutoff, occupation)?
            }
            InitialState::Bell0110 => {
                if cutoff.mode_count() != 2 {
                    return Err(invalid("bell_01_10 needs exactly two modes"));
                }
                DensityMatrix::bell_01_10(cutoff)?
            }
            InitialState::Thermal { n_mean } => DensityMatrix::thermal(cutoff, *n_mean)?,
            InitialState::Explicit { entries } => {
                DensityMatrix::from_matrix(cutoff, operator_from_entries(cutoff, entries)?)?
            }
        };
        let photons = rho.max_total_occupation();
        if self.method == Method::Linear && cutoff.per_mode_max() <= photons {
            return Err(invalid(format!(
                "method linear needs cutoff of at least {}; the state holds up to {photons} photons in total",
                photons + 1
            )));
        }
        Ok(rho)
    }

    pub fn observable_matrix(&self, cutoff: FockCutoff) -> Result<DMatrix<Complex64>, CliError> {
        let obs = self
            .observable
            .as_ref()
            .ok_or_else(|| invalid("observable is required for expect"))?;
        let m = cutoff.mode_count();
        match obs {
            Observable::Number { mode } => {
                if *mode >= m {
                    return Err(invalid(format!("observable mode {mode} out of range for {m} modes")));
                }
                let c = CoeffMatrix::from_fn(m, |i, j| {
                    if i == *mode && j == *mode {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                Ok(bilinear_form(&mode_operators(&cutoff), &c).to_dense())
            }
            Observable::Bilinear { coefficients } => {
                let c = coeff_matrix("observable", coefficients, m)?;
                Ok(bilinear_form(&mode_operators(&cutoff), &c).to_dense())
            }
            Observable::Explicit { entries } => operator_from_entries(cutoff, entries),
        }
    }

    /// Flat `(ket, bra)` indices of the requested matrix elements.
    pub fn element_indices(&self, cutoff: FockCutoff) -> Result<Vec<(usize, usize)>, CliError> {
        self.elements
            .iter()
            .map(|e| Ok((state_index(cutoff, &e.ket)?, state_index(cutoff, &e.bra)?)))
            .collect()
    }
}

fn state_index(cutoff: FockCutoff, occupation: &[usize]) -> Result<usize, CliError> {
    cutoff
        .index_of(occupation)
        .map_err(|_| invalid(format!("occupation {occupation:?} is not a state of the truncated space")))
}

fn operator_from_entries(cutoff: FockCutoff, entries: &[MatrixEntry]) -> Result<DMatrix<Complex64>, CliError> {
    let mut m = DMatrix::zeros(cutoff.dim(), cutoff.dim());
    for e in entries {
        let (i, j) = (state_index(cutoff, &e.ket)?, state_index(cutoff, &e.bra)?);
        m[(i, j)] = complex(e.value);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE: &str = r#"{
        "spec": {"modes": 1, "omega": [[[1.0, 0.0]]], "gamma": [[[0.2, 0.0]]], "n_thermal": 0.1},
        "cutoff": 4,
        "initial_state": {"preset": "fock", "occupation": [2]},
        "times": [0.0, 1.0]
    }"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::parse(SINGLE).unwrap();
        assert_eq!(cfg.method, Method::Exact);
        assert_eq!(cfg.output.format, None);
        let spec = cfg.system_spec().unwrap();
        assert_eq!(spec.mode_count(), 1);
        let rho = cfg.initial_density(cfg.fock_cutoff().unwrap()).unwrap();
        assert_eq!(rho.populations()[2], 1.0);
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = SINGLE.replace("\"cutoff\"", "\"cut_off\"");
        assert!(matches!(RunConfig::parse(&text), Err(CliError::Parse(_))));
    }

    #[test]
    fn non_hermitian_gamma_is_named() {
        let text = r#"{
            "spec": {"modes": 2, "omega": [[[1,0],[0,0]],[[0,0],[1,0]]],
                     "gamma": [[[0.2,0],[0.1,0]],[[0,0],[0.2,0]]], "n_thermal": 0.0},
            "cutoff": 2
        }"#;
        let err = RunConfig::parse(text).unwrap().system_spec().unwrap_err();
        assert_eq!(err.code(), "invalid_spec.gamma_not_hermitian");
    }

    #[test]
    fn wrong_shape_is_rejected() {
        let text = SINGLE.replace("\"modes\": 1", "\"modes\": 2");
        let err = RunConfig::parse(&text).unwrap().system_spec().unwrap_err();
        assert_eq!(err.code(), "invalid_spec.shape");
    }

    #[test]
    fn linear_method_needs_spare_level() {
        let text = SINGLE.replace("[2]", "[4]").replace("\"times\"", "\"method\": \"linear\", \"times\"");
        let cfg = RunConfig::parse(&text).unwrap();
        assert!(cfg.initial_density(cfg.fock_cutoff().unwrap()).is_err());
    }

    #[test]
    fn times_must_ascend() {
        let cfg = RunConfig::parse(&SINGLE.replace("[0.0, 1.0]", "[1.0, 1.0]")).unwrap();
        assert!(cfg.validated_times().is_err());
        let cfg = RunConfig::parse(&SINGLE.replace("[0.0, 1.0]", "[-1.0]")).unwrap();
        assert!(cfg.validated_times().is_err());
    }

    #[test]
    fn explicit_state_and_number_observable() {
        let text = r#"{
            "spec": {"modes": 2, "omega": [[[1,0],[0,0]],[[0,0],[1,0]]],
                     "gamma": [[[0.2,0],[0,0]],[[0,0],[0.2,0]]], "n_thermal": 0.0},
            "cutoff": 2,
            "initial_state": {"preset": "explicit", "entries": [
                {"ket": [0,1], "bra": [0,1], "value": [0.5, 0]},
                {"ket": [1,0], "bra": [1,0], "value": [0.5, 0]}
            ]},
            "observable": {"kind": "number", "mode": 1}
        }"#;
        let cfg = RunConfig::parse(text).unwrap();
        let cutoff = cfg.fock_cutoff().unwrap();
        let rho = cfg.initial_density(cutoff).unwrap();
        let n1 = rho.expectation(&cfg.observable_matrix(cutoff).unwrap()).unwrap();
        assert!((n1.re - 0.5).abs() < 1e-15);
    }
}
