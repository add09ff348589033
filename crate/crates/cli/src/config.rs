//! Flat TOML configuration merged with command-line flags.
//!
//! A config file is a table of the subcommand's parameter names, plus the
//! optional global keys `seed` and `threads`. Flags given on the command
//! line override file values. Unknown keys are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

/// Typed parameters of one subcommand.
pub trait Params: DeserializeOwned + Serialize {
    /// Keys without a default.
    const REQUIRED: &'static [&'static str];
    /// Checks module preconditions before anything is allocated.
    fn validate(&self) -> Result<(), CliError>;
}

pub struct Resolved<P> {
    pub params: P,
    /// Every effective value, defaults included.
    pub table: toml::Table,
    pub flag_overrides: Vec<String>,
    pub seed: u64,
    pub threads: usize,
}

pub struct Globals {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

pub fn read_file(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn take_u64(t: &mut toml::Table, key: &str) -> Result<Option<u64>, CliError> {
    match t.remove(key) {
        None => Ok(None),
        Some(toml::Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
        Some(v) => Err(CliError::Config(format!("`{key}` must be a non-negative integer, got {v}"))),
    }
}

pub fn resolve<P: Params, F: Serialize>(
    file: Option<toml::Table>,
    flags: &F,
    globals: &Globals,
) -> Result<Resolved<P>, CliError> {
    let mut table = file.unwrap_or_default();
    let file_seed = take_u64(&mut table, "seed")?;
    let file_threads = take_u64(&mut table, "threads")?;
    let mut overrides = Vec::new();
    if let serde_json::Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if v.is_null() {
                continue;
            }
            let v = toml::Value::try_from(v).map_err(|e| CliError::Config(e.to_string()))?;
            overrides.push(k.clone());
            table.insert(k, v);
        }
    }
    let missing: Vec<&str> = P::REQUIRED.iter().copied().filter(|k| !table.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(CliError::Config(format!("missing required keys: {}", missing.join(", "))));
    }
    let params: P = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
    params.validate()?;
    let table = toml::Table::try_from(&params).map_err(|e| CliError::Config(e.to_string()))?;
    let mut seed = file_seed.unwrap_or(0);
    if let Some(s) = globals.seed {
        seed = s;
        overrides.push("seed".into());
    }
    let mut threads = file_threads.unwrap_or(1) as usize;
    if let Some(t) = globals.threads {
        threads = t;
        overrides.push("threads".into());
    }
    if threads == 0 {
        return Err(CliError::Config("`threads` must be at least 1".into()));
    }
    overrides.sort();
    Ok(Resolved {
        params,
        table,
        flag_overrides: overrides,
        seed,
        threads,
    })
}

/// Module-tagged precondition failure.
pub fn precondition(module: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{module}: {msg}"))
}

/// Rejects non-positive or non-finite values.
pub fn positive(module: &str, key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(precondition(module, format!("`{key}` must be positive, got {v}")))
    }
}
