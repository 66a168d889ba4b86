//! Run configurations: a single JSON document per run.
//!
//! ```json
//! {
//!   "problem": "two_body",
//!   "phys": { "mur": 1.0, "potentials": [{ "type": "expr", "expr": "-1/r" }] },
//!   "num": { "nmax": 10, "r1": 0.1, "rnmax": 30.0 }
//! }
//! ```
//!
//! `flags`, `observ` and `output` are optional. See the README for every field.

use std::path::{Path, PathBuf};

use fewbody::gem2b::{NumParams2B, PhysParams2B, ResonanceFilter};
use fewbody::gem3b1d::{NumParams3B1D, PhysParams3B1D};
use fewbody::isgl3d::{NumParams3B3D, ObservRequest, PhysParams3B3D};
use fewbody::potentials::{Interpolation, TabulatedPotential};
use fewbody::threebody::GemParams3B;
use fewbody::{Dim, PotentialModel, RangeProgression};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::expr::parse_potential_expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    #[serde(rename = "two_body")]
    TwoBody,
    #[serde(rename = "three_body_1d")]
    ThreeBody1D,
    #[serde(rename = "three_body_3d")]
    ThreeBody3D,
}

impl Problem {
    pub fn as_str(self) -> &'static str {
        match self {
            Problem::TwoBody => "two_body",
            Problem::ThreeBody1D => "three_body_1d",
            Problem::ThreeBody3D => "three_body_3d",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationSpec {
    #[default]
    Linear,
    CubicSpline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `v0 · exp(-mu r²)`
    Gaussian { v0: f64, mu: f64 },
    /// `g · δ(x - x0)`, 1D only.
    #[serde(rename = "contact1d")]
    Contact1D {
        g: f64,
        #[serde(default)]
        x0: f64,
    },
    /// Expression in `r`, see [`crate::expr`].
    Expr { expr: String },
    /// Two-column `r V` file; relative paths resolve against the config file.
    Tabulated {
        path: PathBuf,
        #[serde(default)]
        interpolation: InterpolationSpec,
    },
}

const EXPR_PROBES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

impl PotentialSpec {
    pub fn label(&self) -> String {
        match self {
            PotentialSpec::Gaussian { v0, mu } => format!("{v0}*exp(-{mu}*r^2)"),
            PotentialSpec::Contact1D { g, x0 } => format!("{g}*delta(x-{x0})"),
            PotentialSpec::Expr { expr } => expr.trim().to_string(),
            PotentialSpec::Tabulated { path, .. } => path.display().to_string(),
        }
    }

    pub fn build(&self, base_dir: Option<&Path>, field: &str) -> Result<PotentialModel, CliError> {
        match self {
            PotentialSpec::Gaussian { v0, mu } => PotentialModel::gaussian(*v0, *mu)
                .map_err(|e| CliError::invalid(field, e.to_string())),
            PotentialSpec::Contact1D { g, x0 } => Ok(PotentialModel::contact_1d(*g, *x0)),
            PotentialSpec::Expr { expr } => {
                let ast = parse_potential_expr(expr)
                    .map_err(|e| CliError::invalid(field, e.to_string()))?;
                if let Some(r) = EXPR_PROBES.iter().find(|&&r| !ast.eval(r).is_finite()) {
                    return Err(CliError::invalid(
                        field,
                        format!("`{expr}` is not finite at r = {r}"),
                    ));
                }
                Ok(PotentialModel::analytic(self.label(), move |z| {
                    ast.eval_complex(z)
                }))
            }
            PotentialSpec::Tabulated {
                path,
                interpolation,
            } => {
                let resolved = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let rule = match interpolation {
                    InterpolationSpec::Linear => Interpolation::Linear,
                    InterpolationSpec::CubicSpline => Interpolation::CubicSpline,
                };
                let table = TabulatedPotential::load(&resolved, rule)
                    .map_err(|e| CliError::invalid(field, e.to_string()))?;
                Ok(PotentialModel::Tabulated(table))
            }
        }
    }
}

fn default_dim() -> u32 {
    3
}

fn default_threshold() -> f64 {
    fewbody::eigensolve::DEFAULT_THRESHOLD
}

fn default_kmax() -> usize {
    fewbody::gem3b1d::DEFAULT_KMAX_INTERPOL
}

fn default_parity() -> i8 {
    1
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBodyPhys {
    pub mur: f64,
    #[serde(default = "default_dim")]
    pub dim: u32,
    #[serde(default)]
    pub lmin: u32,
    #[serde(default)]
    pub lmax: u32,
    pub potentials: Vec<PotentialSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceWindow {
    #[serde(default = "ResonanceWindow::default_delta")]
    pub delta_arg_deg: f64,
    #[serde(default)]
    pub min_abs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abs: Option<f64>,
}

impl ResonanceWindow {
    fn default_delta() -> f64 {
        ResonanceFilter::default().delta_arg_deg
    }

    pub fn filter(&self) -> ResonanceFilter {
        ResonanceFilter {
            delta_arg_deg: self.delta_arg_deg,
            min_abs: self.min_abs,
            max_abs: self.max_abs.unwrap_or(f64::INFINITY),
        }
    }
}

impl Default for ResonanceWindow {
    fn default() -> Self {
        Self {
            delta_arg_deg: Self::default_delta(),
            min_abs: 0.0,
            max_abs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBodyNum {
    pub nmax: usize,
    pub r1: f64,
    pub rnmax: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub omega_cr: f64,
    /// Complex scaling angle in degrees.
    #[serde(default)]
    pub theta_csm: f64,
    #[serde(default)]
    pub resonance_window: ResonanceWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeBody1DPhys {
    pub masses: [f64; 3],
    pub svals: [String; 3],
    /// Pair potentials of Jacobi sets 1, 2, 3 (set i: the pair opposite particle i).
    pub potentials: [Vec<PotentialSpec>; 3],
    /// +1, -1, or 0 for both parities.
    #[serde(default = "default_parity")]
    pub parity: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeBody3DPhys {
    pub masses: [f64; 3],
    pub svals: [String; 3],
    pub potentials: [Vec<PotentialSpec>; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeBodyNum {
    pub nmax: usize,
    pub r1: f64,
    pub rnmax: f64,
    #[serde(rename = "Nmax")]
    pub big_nmax: usize,
    #[serde(rename = "R1")]
    pub big_r1: f64,
    #[serde(rename = "RNmax")]
    pub big_rnmax: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_kmax")]
    pub kmax_interpol: usize,
    #[serde(default)]
    pub theta_csm: f64,
    /// Parity-wave window of the pair coordinate (1D only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmin: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmax: Option<u32>,
    #[serde(default, rename = "Lmin", skip_serializing_if = "Option::is_none")]
    pub big_lmin: Option<u32>,
    #[serde(default, rename = "Lmax", skip_serializing_if = "Option::is_none")]
    pub big_lmax: Option<u32>,
}

impl ThreeBodyNum {
    fn gem(&self) -> fewbody::Result<GemParams3B> {
        GemParams3B::new(
            self.nmax,
            self.r1,
            self.rnmax,
            self.big_nmax,
            self.big_r1,
            self.big_rnmax,
        )
    }

    fn has_waves(&self) -> bool {
        self.lmin.is_some()
            || self.lmax.is_some()
            || self.big_lmin.is_some()
            || self.big_lmax.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Phys {
    TwoBody(TwoBodyPhys),
    ThreeBody1D(ThreeBody1DPhys),
    ThreeBody3D(ThreeBody3DPhys),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Num {
    TwoBody(TwoBodyNum),
    ThreeBody(ThreeBodyNum),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeFlag {
    pub stateindex: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvertFlag {
    pub stateindex: usize,
    pub target_e: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    #[serde(default)]
    pub wf: bool,
    #[serde(default)]
    pub cr: bool,
    #[serde(default)]
    pub csm: bool,
    /// Minimize this state's energy over the range parameters before solving.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeFlag>,
    /// Rescale all potentials so that the state has the target energy. Combined
    /// with `optimize`, ranges and scale are fitted jointly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invert: Option<InvertFlag>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservSpec {
    pub stateindices: Vec<usize>,
    /// Central observables of the pair distance in each Jacobi set.
    #[serde(default)]
    pub centobs: [Vec<PotentialSpec>; 3],
    /// Whether `<R²>` of the spectator coordinate is wanted for each set.
    #[serde(default)]
    pub r2: [bool; 3],
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub rmax: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            rmax: 60.0,
            points: 6000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Wavefunctions (or coefficient vectors) are written for this many lowest states per channel.
    #[serde(default = "Output::default_wf_states")]
    pub wf_states: usize,
    /// Radial grid for two-body wavefunctions; 1D grids span `[-rmax, rmax]`.
    #[serde(default)]
    pub grid: Grid,
}

impl Output {
    fn default_wf_states() -> usize {
        4
    }
}

impl Default for Output {
    fn default() -> Self {
        Self {
            format: Format::Json,
            path: None,
            wf_states: Self::default_wf_states(),
            grid: Grid::default(),
        }
    }
}

/// A validated run configuration with all defaults filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub problem: Problem,
    pub phys: Phys,
    pub num: Num,
    #[serde(skip_serializing_if = "is_default")]
    pub flags: Flags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observ: Option<ObservSpec>,
    pub output: Output,
    /// Directory that relative file paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    problem: Problem,
    phys: Value,
    num: Value,
    #[serde(default)]
    flags: Value,
    #[serde(default)]
    observ: Value,
    #[serde(default)]
    output: Value,
}

fn section<T: DeserializeOwned>(name: &str, value: Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." {
            name.to_string()
        } else {
            format!("{name}.{inner}")
        };
        CliError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

fn optional<T: DeserializeOwned + Default>(name: &str, value: Value) -> Result<T, CliError> {
    if value.is_null() {
        Ok(T::default())
    } else {
        section(name, value)
    }
}

/// Parses and validates a configuration; relative paths resolve against the working directory.
pub fn parse_config(text: &str) -> Result<RunSpec, CliError> {
    parse_config_in(text, None)
}

/// Like [`parse_config`], resolving relative paths against `base_dir`.
pub fn parse_config_in(text: &str, base_dir: Option<&Path>) -> Result<RunSpec, CliError> {
    let raw: RawSpec = serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(
        text,
    ))
    .map_err(|e| {
        let path = if e.inner().is_data() {
            e.path().to_string()
        } else {
            "document".to_string()
        };
        CliError::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })?;
    let (phys, num) = match raw.problem {
        Problem::TwoBody => (
            Phys::TwoBody(section("phys", raw.phys)?),
            Num::TwoBody(section("num", raw.num)?),
        ),
        Problem::ThreeBody1D => (
            Phys::ThreeBody1D(section("phys", raw.phys)?),
            Num::ThreeBody(section("num", raw.num)?),
        ),
        Problem::ThreeBody3D => (
            Phys::ThreeBody3D(section("phys", raw.phys)?),
            Num::ThreeBody(section("num", raw.num)?),
        ),
    };
    let observ = if raw.observ.is_null() {
        None
    } else {
        Some(section("observ", raw.observ)?)
    };
    let spec = RunSpec {
        problem: raw.problem,
        phys,
        num,
        flags: optional("flags", raw.flags)?,
        observ,
        output: optional("output", raw.output)?,
        base_dir: base_dir.map(Path::to_path_buf),
    };
    spec.validate()?;
    Ok(spec)
}

/// Pretty-printed canonical form; parsing it yields an equal [`RunSpec`].
pub fn to_canonical_json(spec: &RunSpec) -> String {
    serde_json::to_string_pretty(spec).expect("run specs always serialize")
}

/// Core parameter sets built from a [`RunSpec`].
pub enum Built {
    TwoBody {
        pp: PhysParams2B,
        np: NumParams2B,
    },
    ThreeBody1D {
        pp: PhysParams3B1D,
        np: NumParams3B1D,
    },
    ThreeBody3D {
        pp: PhysParams3B3D,
        np: NumParams3B3D,
        observ: Option<ObservRequest>,
    },
}

fn potential_list(
    specs: &[PotentialSpec],
    base: Option<&Path>,
    field: &str,
) -> Result<Vec<PotentialModel>, CliError> {
    specs
        .iter()
        .enumerate()
        .map(|(i, p)| p.build(base, &format!("{field}[{i}]")))
        .collect()
}

fn potential_sets(
    specs: &[Vec<PotentialSpec>; 3],
    base: Option<&Path>,
    field: &str,
) -> Result<[Vec<PotentialModel>; 3], CliError> {
    let [a, b, c] = specs;
    Ok([
        potential_list(a, base, &format!("{field}[0]"))?,
        potential_list(b, base, &format!("{field}[1]"))?,
        potential_list(c, base, &format!("{field}[2]"))?,
    ])
}

fn svals(s: &[String; 3]) -> [&str; 3] {
    [s[0].as_str(), s[1].as_str(), s[2].as_str()]
}

impl RunSpec {
    /// Checks flag compatibility and builds the core parameters, reporting the first problem.
    pub fn validate(&self) -> Result<(), CliError> {
        self.check_flags()?;
        self.build().map(|_| ())
    }

    fn check_flags(&self) -> Result<(), CliError> {
        let f = &self.flags;
        let two_body = self.problem == Problem::TwoBody;
        let only_two_body = |name: &str| {
            CliError::invalid(
                format!("flags.{name}"),
                format!("only valid for two_body, not {}", self.problem.as_str()),
            )
        };
        if f.cr && !two_body {
            return Err(only_two_body("cr"));
        }
        if f.optimize.is_some() && !two_body {
            return Err(only_two_body("optimize"));
        }
        if f.invert.is_some() && !two_body {
            return Err(only_two_body("invert"));
        }
        if f.csm && (f.optimize.is_some() || f.invert.is_some()) {
            return Err(CliError::invalid(
                "flags.csm",
                "cannot be combined with optimize or invert",
            ));
        }
        if f.cr && (f.optimize.is_some() || f.invert.is_some()) {
            return Err(CliError::invalid(
                "flags.cr",
                "range optimization and inversion use the real-range basis",
            ));
        }
        if let (Some(o), Some(i)) = (f.optimize, f.invert) {
            if o.stateindex != i.stateindex {
                return Err(CliError::invalid(
                    "flags.invert.stateindex",
                    "must equal flags.optimize.stateindex",
                ));
            }
        }
        if f.wf && f.csm {
            return Err(CliError::invalid(
                "flags.wf",
                "wavefunctions are reported for real spectra only",
            ));
        }
        if self.observ.is_some() && self.problem != Problem::ThreeBody3D {
            return Err(CliError::invalid(
                "observ",
                "observables are available for three_body_3d only",
            ));
        }
        if self.observ.is_some() && f.csm {
            return Err(CliError::invalid(
                "observ",
                "observables are evaluated on real bound states only",
            ));
        }
        if let (Num::ThreeBody(n), Problem::ThreeBody3D) = (&self.num, self.problem) {
            if n.has_waves() {
                return Err(CliError::invalid(
                    "num",
                    "lmin/lmax/Lmin/Lmax apply to three_body_1d only",
                ));
            }
        }
        if self.output.grid.points < 2 || !(self.output.grid.rmax > 0.0) {
            return Err(CliError::invalid(
                "output.grid",
                "needs rmax > 0 and at least 2 points",
            ));
        }
        Ok(())
    }

    /// Builds the core parameter sets.
    pub fn build(&self) -> Result<Built, CliError> {
        let base = self.base_dir.as_deref();
        match (&self.phys, &self.num) {
            (Phys::TwoBody(p), Num::TwoBody(n)) => {
                let vints = potential_list(&p.potentials, base, "phys.potentials")?;
                let dim = Dim::new(p.dim).map_err(CliError::solve("phys.dim"))?;
                let pp = PhysParams2B::new(p.mur, vints, dim)
                    .and_then(|pp| pp.with_l_window(p.lmin, p.lmax))
                    .map_err(CliError::solve("phys"))?;
                let mut np = NumParams2B::new(
                    RangeProgression::new(n.nmax, n.r1, n.rnmax).map_err(CliError::solve("num"))?,
                );
                np.threshold = n.threshold;
                np.omega_cr = n.omega_cr;
                np.theta_csm = n.theta_csm;
                np.validate().map_err(CliError::solve("num"))?;
                if self.flags.cr && !(n.omega_cr > 0.0) {
                    return Err(CliError::invalid(
                        "num.omega_cr",
                        "the complex-ranged basis needs omega_cr > 0",
                    ));
                }
                if self.flags.csm && !(n.theta_csm > 0.0) {
                    return Err(CliError::invalid(
                        "num.theta_csm",
                        "complex scaling needs theta_csm > 0",
                    ));
                }
                Ok(Built::TwoBody { pp, np })
            }
            (Phys::ThreeBody1D(p), Num::ThreeBody(n)) => {
                let vints = potential_sets(&p.potentials, base, "phys.potentials")?;
                let pp = PhysParams3B1D::new(p.masses, svals(&p.svals), vints)
                    .and_then(|pp| pp.with_parity(p.parity))
                    .map_err(CliError::solve("phys"))?;
                let mut np = NumParams3B1D::new(n.gem().map_err(CliError::solve("num"))?);
                np.threshold = n.threshold;
                np.kmax_interpol = n.kmax_interpol;
                np.theta_csm = n.theta_csm;
                let np = np
                    .with_parity_waves(
                        n.lmin.unwrap_or(0),
                        n.lmax.unwrap_or(0),
                        n.big_lmin.unwrap_or(0),
                        n.big_lmax.unwrap_or(0),
                    )
                    .map_err(CliError::solve("num"))?;
                self.check_csm_angle(n)?;
                Ok(Built::ThreeBody1D { pp, np })
            }
            (Phys::ThreeBody3D(p), Num::ThreeBody(n)) => {
                let vints = potential_sets(&p.potentials, base, "phys.potentials")?;
                let pp = PhysParams3B3D::new(p.masses, svals(&p.svals), vints)
                    .map_err(CliError::solve("phys"))?;
                let mut np = NumParams3B3D::new(n.gem().map_err(CliError::solve("num"))?);
                np.threshold = n.threshold;
                np.kmax_interpol = n.kmax_interpol;
                np.theta_csm = n.theta_csm;
                np.validate().map_err(CliError::solve("num"))?;
                self.check_csm_angle(n)?;
                let observ = match &self.observ {
                    None => None,
                    Some(o) => {
                        if o.stateindices.is_empty() || o.stateindices.contains(&0) {
                            return Err(CliError::invalid(
                                "observ.stateindices",
                                "needs 1-based state indices",
                            ));
                        }
                        Some(ObservRequest {
                            stateindices: o.stateindices.clone(),
                            centobs: potential_sets(&o.centobs, base, "observ.centobs")?,
                            r2_flags: o.r2,
                        })
                    }
                };
                Ok(Built::ThreeBody3D { pp, np, observ })
            }
            _ => unreachable!("phys and num sections are parsed for the same problem"),
        }
    }

    fn check_csm_angle(&self, n: &ThreeBodyNum) -> Result<(), CliError> {
        if self.flags.csm && !(n.theta_csm > 0.0) {
            return Err(CliError::invalid(
                "num.theta_csm",
                "complex scaling needs theta_csm > 0",
            ));
        }
        Ok(())
    }

    /// The same run with `nmax` (and `Nmax` for three bodies) replaced.
    pub fn with_nmax(&self, nmax: usize) -> RunSpec {
        let mut spec = self.clone();
        match &mut spec.num {
            Num::TwoBody(n) => n.nmax = nmax,
            Num::ThreeBody(n) => {
                n.nmax = nmax;
                n.big_nmax = nmax;
            }
        }
        spec
    }
}
