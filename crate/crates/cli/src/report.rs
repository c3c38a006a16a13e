//! Report types and their JSON and CSV encodings.
//!
//! Every float is written as `%.12e` (`-1.234567890123e-05`), complex values
//! as `[re, im]`. Field order is fixed by declaration order.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::config::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// C-style `%.12e`. Non-finite values become `nan`, `inf` or `-inf`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // -0.0 + 0.0 == +0.0
    let s = format!("{:.12e}", x + 0.0);
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Float serialized through [`sci`]; non-finite values become JSON `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(sci(self.0)).map_err(S::Error::custom)?.serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cplx(pub Sci, pub Sci);

impl Cplx {
    pub fn new(z: lindblad_core::Complex64) -> Self {
        Self(Sci(z.re), Sci(z.im))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: Sci,
    pub tolerance: Sci,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual: Sci(residual),
            tolerance: Sci(tolerance),
            passed: residual.is_finite() && residual < tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumRow {
    pub u: usize,
    pub v: usize,
    pub k: usize,
    pub lambda: Cplx,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub modes: usize,
    pub max_total: usize,
    pub rows: Vec<SpectrumRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ElementValue {
    pub ket: Vec<usize>,
    pub bra: Vec<usize>,
    pub value: Cplx,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolvePoint {
    pub t: Sci,
    pub trace: Cplx,
    pub purity: Sci,
    pub trace_drift: Sci,
    pub leaked: bool,
    pub populations: Vec<Sci>,
    pub mean_occupation: Vec<Sci>,
    pub elements: Vec<ElementValue>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveReport {
    pub method: &'static str,
    pub cutoff: usize,
    /// Occupations of the basis states, in population order.
    pub basis: Vec<Vec<usize>>,
    pub points: Vec<EvolvePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectPoint {
    pub t: Sci,
    pub value: Cplx,
    pub leaked: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectReport {
    pub method: &'static str,
    pub cutoff: usize,
    pub points: Vec<ExpectPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub modes: usize,
    pub cutoff: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Report {
    Spectrum(SpectrumReport),
    Evolve(EvolveReport),
    Expect(ExpectReport),
    Verify(VerifyReport),
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    #[serde(flatten)]
    report: &'a Report,
}

impl Report {
    fn command(&self) -> &'static str {
        match self {
            Self::Spectrum(_) => "spectrum",
            Self::Evolve(_) => "evolve",
            Self::Expect(_) => "expect",
            Self::Verify(_) => "verify",
        }
    }

    /// Names of failed checks.
    pub fn failures(&self) -> Vec<String> {
        let checks: Vec<&Check> = match self {
            Self::Spectrum(r) => r.verification.iter().collect(),
            Self::Evolve(r) => r.verification.iter().collect(),
            Self::Expect(r) => r.verification.iter().collect(),
            Self::Verify(r) => r.checks.iter().collect(),
        };
        checks.into_iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            report: self,
        };
        let mut out = serde_json::to_string_pretty(&envelope).map_err(|e| CliError::Output(e.to_string()))?;
        out.push('\n');
        Ok(out)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let (header, rows, trailer) = self.table();
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&header).map_err(fail)?;
        for r in &rows {
            w.write_record(r).map_err(fail)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| CliError::Output(e.to_string()))?)
            .map_err(|e| CliError::Output(e.to_string()))?;
        let mut out = format!("# lindblad {} csv schema v{SCHEMA_VERSION}\n{body}", self.command());
        for line in trailer {
            out.push_str(&format!("# {line}\n"));
        }
        Ok(out)
    }

    fn table(&self) -> (Vec<String>, Vec<Vec<String>>, Vec<String>) {
        let bool_str = |b: bool| if b { "true".to_string() } else { "false".to_string() };
        let check_line = |c: &Option<Check>| -> Vec<String> {
            c.iter()
                .map(|c| {
                    format!(
                        "{} residual={} tolerance={} passed={}",
                        c.name,
                        sci(c.residual.0),
                        sci(c.tolerance.0),
                        c.passed
                    )
                })
                .collect()
        };
        match self {
            Self::Spectrum(r) => (
                ["u", "v", "k", "re", "im"].map(String::from).to_vec(),
                r.rows
                    .iter()
                    .map(|row| {
                        vec![
                            row.u.to_string(),
                            row.v.to_string(),
                            row.k.to_string(),
                            sci(row.lambda.0 .0),
                            sci(row.lambda.1 .0),
                        ]
                    })
                    .collect(),
                check_line(&r.verification),
            ),
            Self::Evolve(r) => {
                let mut header: Vec<String> = ["t", "trace_re", "trace_im", "purity", "trace_drift", "leaked"]
                    .map(String::from)
                    .to_vec();
                header.extend(r.basis.iter().map(|occ| format!("p_{}", occupation_label(occ))));
                let modes = r.points.first().map_or(0, |p| p.mean_occupation.len());
                header.extend((0..modes).map(|k| format!("n_{k}")));
                if let Some(p) = r.points.first() {
                    for e in &p.elements {
                        let label = format!("rho_{}__{}", occupation_label(&e.ket), occupation_label(&e.bra));
                        header.push(format!("{label}_re"));
                        header.push(format!("{label}_im"));
                    }
                }
                let rows = r
                    .points
                    .iter()
                    .map(|p| {
                        let mut row = vec![
                            sci(p.t.0),
                            sci(p.trace.0 .0),
                            sci(p.trace.1 .0),
                            sci(p.purity.0),
                            sci(p.trace_drift.0),
                            bool_str(p.leaked),
                        ];
                        row.extend(p.populations.iter().map(|x| sci(x.0)));
                        row.extend(p.mean_occupation.iter().map(|x| sci(x.0)));
                        for e in &p.elements {
                            row.push(sci(e.value.0 .0));
                            row.push(sci(e.value.1 .0));
                        }
                        row
                    })
                    .collect();
                (header, rows, check_line(&r.verification))
            }
            Self::Expect(r) => (
                ["t", "re", "im", "leaked"].map(String::from).to_vec(),
                r.points
                    .iter()
                    .map(|p| vec![sci(p.t.0), sci(p.value.0 .0), sci(p.value.1 .0), bool_str(p.leaked)])
                    .collect(),
                check_line(&r.verification),
            ),
            Self::Verify(r) => (
                ["name", "residual", "tolerance", "passed"].map(String::from).to_vec(),
                r.checks
                    .iter()
                    .map(|c| vec![c.name.clone(), sci(c.residual.0), sci(c.tolerance.0), bool_str(c.passed)])
                    .collect(),
                vec![format!("passed={}", r.passed)],
            ),
        }
    }
}

fn occupation_label(occ: &[usize]) -> String {
    occ.iter().map(usize::to_string).collect::<Vec<_>>().join("_")
}
