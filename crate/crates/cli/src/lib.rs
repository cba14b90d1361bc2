//! Scenario runner behind the `nslab` binary.
//!
//! Each scenario reads a [`RunConfig`], runs one experiment and writes
//! `results.json` plus CSV/SVG artifacts into the output directory.

pub mod config;
mod scenarios;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nonscatter::scatter::FAR_FIELD_CONVENTION;
use nonscatter::specialfun::FundamentalSolution;
use serde::Serialize;
use serde_json::{Map, Value};

pub use config::{KeySpec, RunConfig, COMMON_KEYS};
pub use scenarios::SCENARIOS;

/// Bumped whenever the layout of `results.json` changes.
pub const RESULTS_FORMAT: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown scenario `{0}` (try `nslab list`)")]
    UnknownScenario(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("scenario failed: {0}")]
    Scenario(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownScenario(_) | CliError::Config(_) => 2,
            CliError::Scenario(_) | CliError::Io(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

impl From<nonscatter::Error> for CliError {
    fn from(e: nonscatter::Error) -> Self {
        match e {
            nonscatter::Error::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            // library argument checks are driven by config values
            nonscatter::Error::InvalidArgument(_) | nonscatter::Error::UnsupportedOrder(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Scenario(e.to_string()),
        }
    }
}

/// Everything a scenario produces.
#[derive(Debug, Default)]
pub struct Report {
    pub results: Map<String, Value>,
    pub checks: BTreeMap<String, bool>,
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    pub fn put(&mut self, key: &str, v: impl Serialize) {
        let v = serde_json::to_value(v).expect("results are serializable");
        self.results.insert(key.to_string(), v);
    }

    pub fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }

    pub fn artifact(&mut self, name: &str, body: String) {
        self.artifacts.push((name.to_string(), body));
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }
}

pub struct Scenario {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [KeySpec],
    pub run: fn(&RunConfig) -> Result<Report, CliError>,
}

pub fn find(name: &str) -> Result<&'static Scenario, CliError> {
    SCENARIOS
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| CliError::UnknownScenario(name.to_string()))
}

/// Build the config of `scenario` from an optional config file
/// (`None` or `"default"` means all defaults).
pub fn load_config(scenario: &str, path: Option<&Path>) -> Result<RunConfig, CliError> {
    let s = find(scenario)?;
    let text = match path {
        None => String::new(),
        Some(p) if p.as_os_str() == "default" => String::new(),
        Some(p) => fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
    };
    RunConfig::parse(scenario, s.keys, &text)
}

/// Serialized `results.json` body.
pub fn results_json(cfg: &RunConfig, report: &Report) -> String {
    let mut config: Map<String, Value> =
        cfg.entries().iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    config.insert("scenario".into(), Value::String(cfg.scenario.clone()));
    let mut conventions = Map::new();
    conventions.insert("far_field".into(), FAR_FIELD_CONVENTION.into());
    conventions.insert("laplace_kernel".into(), FundamentalSolution::Laplace.convention().into());
    conventions.insert(
        "helmholtz_kernel".into(),
        FundamentalSolution::helmholtz(1.0).expect("positive wavenumber").convention().into(),
    );
    let mut versions = Map::new();
    versions.insert("nonscatter".into(), nonscatter::VERSION.into());
    versions.insert("nslab".into(), env!("CARGO_PKG_VERSION").into());
    versions.insert("results_format".into(), RESULTS_FORMAT.into());
    let mut root = Map::new();
    root.insert("scenario".into(), cfg.scenario.clone().into());
    root.insert("config".into(), Value::Object(config));
    root.insert("conventions".into(), Value::Object(conventions));
    root.insert("versions".into(), Value::Object(versions));
    root.insert("results".into(), Value::Object(report.results.clone()));
    root.insert("checks".into(), serde_json::to_value(&report.checks).expect("bool map"));
    root.insert("passed".into(), report.passed().into());
    let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("json");
    s.push('\n');
    s
}

/// Run a scenario and write its outputs. Returns the output directory and
/// the report; failed checks are reported as [`CliError::Scenario`] after
/// the files are written.
pub fn run(cfg: &RunConfig) -> Result<(PathBuf, Report), CliError> {
    let s = find(&cfg.scenario)?;
    let report = (s.run)(cfg)?;
    let out = PathBuf::from(cfg.str("output.dir"));
    fs::create_dir_all(&out)?;
    for (name, body) in &report.artifacts {
        fs::write(out.join(name), body)?;
    }
    fs::write(out.join("results.json"), results_json(cfg, &report))?;
    Ok((out, report))
}

/// One line per scenario, followed by its keys and defaults.
pub fn list_text(with_keys: bool) -> String {
    let mut s = String::new();
    for sc in SCENARIOS {
        s.push_str(&format!("{:<22}{}\n", sc.name, sc.about));
        if with_keys {
            for (k, d, about) in COMMON_KEYS.iter().chain(sc.keys) {
                s.push_str(&format!("    {k} = {d:<20} # {about}\n"));
            }
        }
    }
    s
}
