//! Parameter resolution and the two failure channels.
//!
//! Values come from, in priority order: the explicit flag, the `--config`
//! JSON object (key = flag name with `-` replaced by `_`), then the built-in
//! default. Whatever wins is recorded so the run manifest can list the full
//! resolved parameter set.

use std::fs;
use std::path::Path;

use clap::{CommandFactory, ValueEnum};
use serde_json::{json, Map, Value};

use crate::args::{Cli, SchemeArg};

/// Usage problems exit with code 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(anyhow::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn domain<E: Into<anyhow::Error>>(e: E) -> Self {
        CliError::Domain(e.into())
    }
}

impl From<readout_core::CoreError> for CliError {
    fn from(e: readout_core::CoreError) -> Self {
        CliError::domain(e)
    }
}

impl From<readout_lindblad::LindbladError> for CliError {
    fn from(e: readout_lindblad::LindbladError) -> Self {
        CliError::domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::domain(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::domain(e)
    }
}

/// Usage line of one subcommand, for error messages raised after parsing.
/// Includes the leading "Usage:" prefix.
pub fn render_usage(subcommand: &str) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    match cmd.find_subcommand_mut(subcommand) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

pub struct Resolver {
    cfg: Map<String, Value>,
    usage: String,
    /// Every value that won, keyed by config-style name.
    pub resolved: Map<String, Value>,
}

impl Resolver {
    pub fn new(config: Option<&Path>, subcommand: &str) -> CliResult<Self> {
        let cfg = match config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::domain(anyhow::anyhow!("cannot read {}: {e}", path.display()))
                })?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => {
                        return Err(CliError::domain(anyhow::anyhow!(
                            "{}: config must be a JSON object",
                            path.display()
                        )))
                    }
                    Err(e) => {
                        return Err(CliError::domain(anyhow::anyhow!(
                            "{}: invalid JSON: {e}",
                            path.display()
                        )))
                    }
                }
            }
            None => Map::new(),
        };
        Ok(Resolver {
            cfg,
            usage: render_usage(subcommand),
            resolved: Map::new(),
        })
    }

    fn missing(&self, flag: &str, key: &str) -> CliError {
        CliError::Usage(format!(
            "error: missing required value for --{flag} \
             (pass the flag or set \"{key}\" in --config)\n\n{}",
            self.usage
        ))
    }

    fn bad_config(&self, key: &str, want: &str) -> CliError {
        CliError::Usage(format!(
            "error: config value for \"{key}\" must be {want}\n\n{}",
            self.usage
        ))
    }

    /// Rejects a flag that does not apply under the active unit system.
    pub fn reject<T>(&self, flag: &str, value: &Option<T>, why: &str) -> CliResult<()> {
        if value.is_some() {
            return Err(CliError::Usage(format!(
                "error: --{flag} {why}\n\n{}",
                self.usage
            )));
        }
        Ok(())
    }

    pub fn f64(&mut self, flag: &str, explicit: Option<f64>, default: Option<f64>) -> CliResult<f64> {
        let key = flag.replace('-', "_");
        let v = if let Some(x) = explicit {
            x
        } else if let Some(raw) = self.cfg.get(&key) {
            raw.as_f64().ok_or_else(|| self.bad_config(&key, "a number"))?
        } else if let Some(d) = default {
            d
        } else {
            return Err(self.missing(flag, &key));
        };
        self.resolved.insert(key, json!(v));
        Ok(v)
    }

    /// Like [`Resolver::f64`] but allows the value to stay absent.
    pub fn f64_opt(&mut self, flag: &str, explicit: Option<f64>) -> CliResult<Option<f64>> {
        let key = flag.replace('-', "_");
        let v = if let Some(x) = explicit {
            Some(x)
        } else if let Some(raw) = self.cfg.get(&key) {
            Some(raw.as_f64().ok_or_else(|| self.bad_config(&key, "a number"))?)
        } else {
            None
        };
        if let Some(x) = v {
            self.resolved.insert(key, json!(x));
        }
        Ok(v)
    }

    pub fn usize(
        &mut self,
        flag: &str,
        explicit: Option<usize>,
        default: Option<usize>,
    ) -> CliResult<usize> {
        let key = flag.replace('-', "_");
        let v = if let Some(x) = explicit {
            x
        } else if let Some(raw) = self.cfg.get(&key) {
            raw.as_u64()
                .ok_or_else(|| self.bad_config(&key, "a nonnegative integer"))? as usize
        } else if let Some(d) = default {
            d
        } else {
            return Err(self.missing(flag, &key));
        };
        self.resolved.insert(key, json!(v));
        Ok(v)
    }

    pub fn scheme(&mut self, explicit: Option<SchemeArg>, default: SchemeArg) -> CliResult<SchemeArg> {
        let v = if let Some(s) = explicit {
            s
        } else if let Some(raw) = self.cfg.get("scheme") {
            let s = raw
                .as_str()
                .ok_or_else(|| self.bad_config("scheme", "a string"))?;
            SchemeArg::from_str(s, true).map_err(|_| {
                self.bad_config("scheme", "one of dispersive, ar, al (or the long names)")
            })?
        } else {
            default
        };
        self.resolved
            .insert("scheme".to_string(), serde_json::to_value(v.kind()).unwrap());
        Ok(v)
    }

    /// Records a resolved non-flag setting so it shows up in the manifest.
    pub fn note<T: serde::Serialize>(&mut self, key: &str, value: T) {
        self.resolved
            .insert(key.to_string(), serde_json::to_value(value).unwrap());
    }

    /// Lifts the entries of a nested config object (for example a
    /// `"transmon": {...}` block) to the top level, applying `renames` of
    /// (nested key, flag key) and never overwriting existing top-level keys.
    pub fn adopt_nested(&mut self, key: &str, renames: &[(&str, &str)]) {
        let Some(Value::Object(nested)) = self.cfg.get(key).cloned() else {
            return;
        };
        for (k, v) in nested {
            let name = renames
                .iter()
                .find(|(from, _)| *from == k)
                .map(|(_, to)| to.to_string())
                .unwrap_or(k);
            self.cfg.entry(name).or_insert(v);
        }
    }
}
