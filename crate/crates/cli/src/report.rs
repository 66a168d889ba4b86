//! Run reports and their JSON/CSV renderings.
//!
//! JSON keys follow struct field order and numbers use the shortest
//! representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, Problem};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateEnergy {
    /// Angular momentum for two-body runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<u32>,
    /// 1-based index within the channel.
    pub state: usize,
    pub re: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<f64>,
    /// `-2 Im E` under complex scaling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<u32>,
    pub size: usize,
    pub kept_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resonance {
    pub channel: u32,
    pub re: f64,
    pub im: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Wavefunction {
    pub channel: u32,
    pub state: usize,
    pub energy: f64,
    /// Riemann sum of `density` over the grid.
    pub norm: f64,
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    /// Probability density per unit `r`, angular parts integrated out.
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficients {
    pub state: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableValue {
    /// Jacobi set, 1-based.
    pub set: usize,
    pub observable: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateObservableReport {
    pub state: usize,
    pub energy: f64,
    pub values: Vec<ObservableValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeReport {
    pub stateindex: usize,
    pub r1: f64,
    pub rnmax: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertReport {
    pub stateindex: usize,
    pub target_e: f64,
    pub vscale: f64,
    pub energy: f64,
    pub r1: f64,
    pub rnmax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub problem: Problem,
    pub energies: Vec<StateEnergy>,
    /// Total number of basis directions kept after overlap truncation.
    pub kept_dim: usize,
    pub basis: Vec<BasisDiagnostics>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub resonances: Vec<Resonance>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub wavefunctions: Vec<Wavefunction>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub coefficients: Vec<Coefficients>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub observables: Vec<StateObservableReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invert: Option<InvertReport>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub nmax: usize,
    pub basis_size: usize,
    pub kept_dim: usize,
    /// Real part of the lowest eigenvalue.
    pub energy: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub problem: Problem,
    pub rows: Vec<BenchRow>,
}

/// Shortest round-trip decimal form, with an exponent for very large or small magnitudes.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }

    /// Header row, then one row per state. Observable columns are `set<i>:<name>`.
    pub fn to_csv(&self) -> String {
        let mut columns: Vec<(usize, String)> = Vec::new();
        for obs in &self.observables {
            for v in &obs.values {
                if !columns
                    .iter()
                    .any(|(s, o)| *s == v.set && *o == v.observable)
                {
                    columns.push((v.set, v.observable.clone()));
                }
            }
        }
        let mut out = String::from("channel,state,energy_re,energy_im,width");
        for (set, name) in &columns {
            write!(out, ",{}", csv_field(&format!("set{set}:{name}"))).unwrap();
        }
        out.push('\n');
        for e in &self.energies {
            let channel = e.channel.map(|l| l.to_string()).unwrap_or_default();
            write!(
                out,
                "{channel},{},{},{},{}",
                e.state,
                fmt_f64(e.re),
                opt(e.im),
                opt(e.width)
            )
            .unwrap();
            let obs = if e.channel.is_none() {
                self.observables.iter().find(|o| o.state == e.state)
            } else {
                None
            };
            for (set, name) in &columns {
                let v = obs.and_then(|o| {
                    o.values
                        .iter()
                        .find(|v| v.set == *set && v.observable == *name)
                });
                write!(out, ",{}", opt(v.map(|v| v.value))).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("nmax,basis_size,kept_dim,energy,wall_time_s\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.nmax,
                r.basis_size,
                r.kept_dim,
                fmt_f64(r.energy),
                fmt_f64(r.wall_time_s)
            )
            .unwrap();
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `text` to `path`, or to stdout without one.
pub fn write_output(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// Path of the density file for one wavefunction, next to the main report.
pub fn density_path(report_path: &Path, wf: &Wavefunction) -> PathBuf {
    let stem = report_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report_path.with_file_name(format!(
        "{stem}.l{}.state{}.density.dat",
        wf.channel, wf.state
    ))
}

/// Two columns `r density`, preceded by a `#` header line.
pub fn density_table(wf: &Wavefunction) -> String {
    let mut out = format!(
        "# r density  (channel {}, state {}, E = {})\n",
        wf.channel,
        wf.state,
        fmt_f64(wf.energy)
    );
    for (r, d) in wf.r.iter().zip(&wf.density) {
        writeln!(out, "{} {}", fmt_f64(*r), fmt_f64(*d)).unwrap();
    }
    out
}

/// Writes the report, plus one density file per wavefunction when `path` is given.
/// Returns the density files written.
pub fn emit_report(
    report: &Report,
    format: Format,
    path: Option<&Path>,
) -> Result<Vec<PathBuf>, CliError> {
    write_output(&report.render(format), path)?;
    let mut written = Vec::new();
    if let Some(p) = path {
        for wf in &report.wavefunctions {
            let target = density_path(p, wf);
            write_file(&target, &density_table(wf))?;
            written.push(target);
        }
    }
    Ok(written)
}
