//! Scenario files: a JSON document with a `scenarios` array.

use serde::{Deserialize, Serialize};
use wparab_core::radial::AsymptoticHint;

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 0x00c0_ffee;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub scenarios: Vec<Scenario>,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Scenario {
    pub id: String,
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submanifold: Option<SubmanifoldSpec>,
    #[serde(flatten)]
    pub task: Task,
    /// Overrides the file-level seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `w` and `f` are catalog names such as `hyperbolic(-1)` or `power(1,3)`,
/// or expressions in `t`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub m: usize,
    #[serde(default = "default_w")]
    pub w: String,
    #[serde(default = "default_f")]
    pub f: String,
    /// Declares an expression weight singular at the pole.
    #[serde(default)]
    pub f_pole_singular: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    /// Non-radial addition to the log-density of a Euclidean ambient, an
    /// expression in `x1..xm`. Used by submanifold tasks only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_extra: Option<String>,
}

fn default_w() -> String {
    "euclidean".into()
}

fn default_f() -> String {
    "zero".into()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SubmanifoldSpec {
    Sphere {
        a: f64,
    },
    Plane {
        normal: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// `ℝ^k × {0}`; with `k = m` the ambient itself.
    CoordinatePlane {
        k: usize,
    },
    Cylinder {
        a: f64,
        k: usize,
    },
    Graph {
        expr: String,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
    Helicoid {
        pitch: f64,
    },
    GrimCurve,
}

fn default_half_width() -> f64 {
    wparab_core::geometry::catalog::HALF_WIDTH
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "task", content = "params", rename_all = "kebab-case")]
pub enum Task {
    Classify(ClassifyParams),
    Capacity(CapacityParams),
    Curves(CurvesParams),
    McVerify(McParams),
    CheckIdentities(IdentityParams),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Classify(_) => "classify",
            Task::Capacity(_) => "capacity",
            Task::Curves(_) => "curves",
            Task::McVerify(_) => "mc-verify",
            Task::CheckIdentities(_) => "check-identities",
        }
    }
}

/// How condition (A) is established for a theorem run.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionSpec {
    #[default]
    Unchecked,
    Asserted,
    /// Sampled on the scenario's submanifold over its parameter box.
    Sampled,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyParams {
    /// `ahlfors`, `thm32`, `thm33` or a `cor_*` name.
    pub criterion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default)]
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
    #[serde(default)]
    pub exp_integral: bool,
    #[serde(default)]
    pub hint: AsymptoticHint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_a: Option<ConditionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assert_reason: Option<String>,
    #[serde(default)]
    pub assert_beyond: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CapacityParams {
    pub rho: f64,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    /// Also report the capacity of `B_ρ` relative to the whole model.
    #[serde(default)]
    pub to_infinity: bool,
    #[serde(default)]
    pub hint: AsymptoticHint,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CurvesParams {
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Extra abscissae merged into the grid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t_extra: Vec<f64>,
    /// Dimension for the `Hh_n` column; defaults to `m - 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
}

fn default_samples() -> usize {
    64
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum McMode {
    Hit,
    Comparison,
    Recurrence,
    Generator,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct McParams {
    pub mode: McMode,
    /// Parameter point on the submanifold.
    pub start: Vec<f64>,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub schedule: Vec<f64>,
    #[serde(rename = "N", default = "default_paths")]
    pub paths: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Classification backing a comparison run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<ClassifyParams>,
    /// Test function for the generator mode, an expression in `u1..un`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
}

fn default_rho() -> f64 {
    1.0
}

fn default_paths() -> usize {
    10_000
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityParams {
    #[serde(default = "default_points")]
    pub points: usize,
    /// Radial test functions `ψ(t)`.
    #[serde(default = "default_psi")]
    pub psi: Vec<String>,
    #[serde(default = "default_clearance")]
    pub pole_clearance: f64,
}

fn default_points() -> usize {
    10
}

fn default_psi() -> Vec<String> {
    vec!["t^2".into(), "sin(t)".into(), "exp(-t)".into()]
}

fn default_clearance() -> f64 {
    0.2
}

/// Parses a config and attaches line/column to errors.
pub fn parse_config(text: &str) -> Result<Config, crate::ConfigError> {
    let config: Config = serde_json::from_str(text).map_err(|e| crate::ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if config.version != CONFIG_VERSION {
        return Err(crate::ConfigError::Version(config.version));
    }
    let mut seen = std::collections::BTreeSet::new();
    for s in &config.scenarios {
        if !seen.insert(s.id.as_str()) {
            return Err(crate::ConfigError::DuplicateId(s.id.clone()));
        }
    }
    Ok(config)
}
