//! JSON experiment configs, applied as extra command-line flags.
//!
//! Each key `k` of the config object becomes `--k <value>` right after the
//! subcommand, so explicit flags given later on the command line win and
//! unknown keys are rejected by the same parser as unknown flags.

use std::path::Path;

use serde_json::{Map, Value};

use crate::CliError;

/// Global options that take a value, needed to locate the subcommand.
const VALUED_GLOBALS: &[&str] = &["--seed", "--output", "-o", "--format", "--config"];

fn scalar(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        // [a, b] pairs render as `a:b`, as in `--candidates 0.1:0.6,...`
        Value::Array(pair) => pair
            .iter()
            .map(|x| scalar(key, x))
            .collect::<Result<Vec<_>, _>>()
            .map(|v| v.join(":")),
        _ => Err(CliError::new("config", format!("unsupported value for `{key}`: {v}"))),
    }
}

fn flags(map: &Map<String, Value>) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) => {}
            Value::Array(items) => {
                let parts = items.iter().map(|x| scalar(key, x)).collect::<Result<Vec<_>, _>>()?;
                out.push(flag);
                out.push(parts.join(","));
            }
            other => {
                out.push(flag);
                out.push(scalar(key, other)?);
            }
        }
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = args[i].as_str();
        if VALUED_GLOBALS.contains(&a) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

/// Expands `--config <file>` into flags inserted after the subcommand.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::new("config", format!("{path}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::new("config", format!("{path}: {e}")))?;
    let Value::Object(map) = value else {
        return Err(CliError::new("config", "config must be a JSON object"));
    };
    let extra = flags(&map)?;
    let Some(at) = subcommand_index(&args) else {
        return Err(CliError::new("config", "a subcommand is required"));
    };
    let mut out = args[..=at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}
