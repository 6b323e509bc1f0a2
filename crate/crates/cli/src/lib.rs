//! Scenario runner behind the `wparab` binary.
//!
//! A run parses a JSON config, executes each scenario independently and
//! assembles one report per scenario in config order. Curve scenarios also
//! produce a CSV table.

pub mod catalog;
pub mod config;
pub mod curves;
mod tasks;

use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};
use wparab_core::criteria::CriteriaError;
use wparab_core::geometry::GeometryError;
use wparab_core::model::ModelError;
use wparab_core::stochastic::StochasticError;

pub use config::{parse_config, Config, Scenario, Task};
pub use curves::{emit_curves, CurveTable};

pub const REPORT_SCHEMA: &str = "wparab-report/1";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported config version {0}")]
    Version(u32),
    #[error("duplicate scenario id `{0}`")]
    DuplicateId(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
}

impl ScenarioError {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Catalog(_) => "catalog",
            ScenarioError::Invalid(_) => "invalid",
            ScenarioError::Model(_) => "model",
            ScenarioError::Geometry(_) => "geometry",
            ScenarioError::Criteria(_) => "criteria",
            ScenarioError::Stochastic(_) => "stochastic",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Replaces the config's file-level seed.
    pub seed: Option<u64>,
    /// Runs only scenarios of this task (`curves`, `mc-verify`, ...).
    pub only_task: Option<String>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Value,
    /// `(scenario id, table)` for curve scenarios that succeeded.
    pub tables: Vec<(String, CurveTable)>,
    pub errors: usize,
}

impl RunOutput {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` and one `<id>.csv` per curve table.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.report_json())?;
        for (id, table) in &self.tables {
            std::fs::write(dir.join(csv_name(id)), table.to_csv())?;
        }
        Ok(())
    }
}

/// File name for a scenario's curve table; characters outside
/// `[A-Za-z0-9._-]` become `_`.
pub fn csv_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect();
    format!("{safe}.csv")
}

struct ScenarioOutcome {
    report: Value,
    table: Option<CurveTable>,
    failed: bool,
}

fn run_scenario(s: &Scenario, file_seed: u64) -> ScenarioOutcome {
    let seed = s.seed.unwrap_or(file_seed);
    let mut report = json!({
        "id": s.id,
        "task": s.task.name(),
        "seed": seed,
        "model": s.model,
        "submanifold": s.submanifold,
        "params": s.task,
    });
    // The flattened task puts `task` and `params` under `params`; keep
    // only the parameters.
    if let Some(inner) = report["params"].get("params").cloned() {
        report["params"] = inner;
    }
    match tasks::run(s, seed) {
        Ok(out) => {
            report["status"] = json!("ok");
            report["result"] = out.result;
            if out.csv.is_some() {
                report["csv"] = json!(csv_name(&s.id));
            }
            ScenarioOutcome {
                report,
                table: out.csv,
                failed: false,
            }
        }
        Err(e) => {
            report["status"] = json!("error");
            report["error"] = json!({ "kind": e.kind(), "message": e.to_string() });
            ScenarioOutcome {
                report,
                table: None,
                failed: true,
            }
        }
    }
}

/// Runs every selected scenario. Scenarios do not share state, so one
/// failing leaves the others untouched.
pub fn run_config(config: &Config, opts: &RunOptions) -> RunOutput {
    let seed = opts.seed.unwrap_or(config.seed);
    let selected: Vec<&Scenario> = config
        .scenarios
        .iter()
        .filter(|s| opts.only_task.as_deref().is_none_or(|t| s.task.name() == t))
        .collect();
    let work = || -> Vec<ScenarioOutcome> { selected.par_iter().map(|s| run_scenario(s, seed)).collect() };
    let outcomes = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(work))
            .unwrap_or_else(|_| work()),
        None => work(),
    };
    let errors = outcomes.iter().filter(|o| o.failed).count();
    let tables = selected
        .iter()
        .zip(&outcomes)
        .filter_map(|(s, o)| o.table.clone().map(|t| (s.id.clone(), t)))
        .collect();
    let report = json!({
        "schema": REPORT_SCHEMA,
        "version": config.version,
        "seed": seed,
        "scenarios": outcomes.into_iter().map(|o| o.report).collect::<Vec<_>>(),
    });
    RunOutput { report, tables, errors }
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// One line per scenario for the terminal.
pub fn summary(out: &RunOutput) -> String {
    let mut lines = Vec::new();
    for s in out.report["scenarios"].as_array().into_iter().flatten() {
        let id = s["id"].as_str().unwrap_or("?");
        let task = s["task"].as_str().unwrap_or("?");
        let detail = if s["status"] == "error" {
            format!("ERROR {}", s["error"]["message"].as_str().unwrap_or(""))
        } else {
            headline(task, &s["result"])
        };
        lines.push(format!("{id} [{task}] {detail}"));
    }
    lines.join("\n")
}

fn headline(task: &str, r: &Value) -> String {
    match task {
        "classify" => format!("outcome {}", r["outcome"].as_str().unwrap_or("?")),
        "capacity" => match (&r["annulus"]["capacity"], &r["to_infinity"]["capacity"]) {
            (Value::Number(c), _) => format!("capacity {c}"),
            (_, Value::Number(c)) => format!("capacity to infinity {c}"),
            _ => "capacity to infinity undetermined".into(),
        },
        "curves" => format!("{} rows", r["rows"]),
        "mc-verify" => {
            if let Some(p) = r.get("p_hat") {
                format!("p_hat {p}")
            } else if let Some(c) = r.get("comparison") {
                format!("comparison passes={} margin {}", c["passes"], c["margin"])
            } else if let Some(g) = r.get("generator") {
                format!("generator passes={}", g["passes"])
            } else {
                format!("trend {}", r["trend"])
            }
        }
        "check-identities" => format!("max residual {}", r["max_residual"]),
        _ => String::new(),
    }
}
