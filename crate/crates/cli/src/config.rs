//! Flat `key = value` run configuration.
//!
//! One entry per line, keys are dotted paths (`grid.sizes = 128, 256`),
//! `#` starts a comment. Every scenario has a fixed key set with defaults;
//! unknown or repeated keys are rejected.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::CliError;

/// Key, default value, description.
pub type KeySpec = (&'static str, &'static str, &'static str);

/// Keys shared by every scenario.
pub const COMMON_KEYS: &[KeySpec] = &[
    ("output.dir", "", "output directory (default nslab-out/<scenario>); --out overrides"),
    ("seed", "20240611", "seed for randomized sampling (ChaCha8)"),
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: String,
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Defaults for `scenario` overridden by `text` (the config file body).
    pub fn parse(scenario: &str, keys: &[KeySpec], text: &str) -> Result<RunConfig, CliError> {
        let mut values: BTreeMap<String, String> = COMMON_KEYS
            .iter()
            .chain(keys)
            .map(|(k, v, _)| (k.to_string(), v.to_string()))
            .collect();
        let mut seen = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!("line {}: expected `key = value`", lineno + 1)));
            };
            let (k, v) = (k.trim(), v.trim());
            if seen.insert(k.to_string(), ()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{k}`", lineno + 1)));
            }
            if k == "scenario" {
                if v != scenario {
                    return Err(CliError::Config(format!(
                        "config is for scenario `{v}`, not `{scenario}`"
                    )));
                }
                continue;
            }
            match values.get_mut(k) {
                Some(slot) => *slot = v.to_string(),
                None => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key `{k}` for scenario {scenario}",
                        lineno + 1
                    )))
                }
            }
        }
        if values["output.dir"].is_empty() {
            values.insert("output.dir".into(), format!("nslab-out/{scenario}"));
        }
        Ok(RunConfig { scenario: scenario.to_string(), values })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("no config key {key}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self.str(key);
        v.parse().map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{v}`")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError> {
        let v = self.str(key);
        let out: Result<Vec<T>, _> = v.split(',').map(|s| s.trim().parse()).collect();
        match out {
            Ok(l) if !l.is_empty() => Ok(l),
            _ => Err(CliError::Config(format!("`{key}`: cannot parse list `{v}`"))),
        }
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}
