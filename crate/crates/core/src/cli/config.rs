//! `--config` files: a flat JSON object of command parameters and global
//! options. Flags given on the command line take precedence.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use super::CliError;

pub type Params = Map<String, Value>;

pub const GLOBAL_KEYS: [&str; 4] = ["format", "precision", "output", "seed"];

pub fn load(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Validation("config must be a JSON object".into())),
        Err(e) => Err(CliError::Validation(format!("config {}: {e}", path.display()))),
    }
}

/// Overlays the non-null fields of `flags` on `config` and deserializes the
/// result. Unknown keys are rejected by `T`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: Params) -> Result<T, CliError> {
    let mut merged = config;
    if let Ok(Value::Object(map)) = serde_json::to_value(flags) {
        for (k, v) in map {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Validation(format!("config: {e}")))
}

/// Splits `config` into global options and command parameters. A `command`
/// key, when present, must name the running subcommand.
pub fn split(mut config: Params, command: &str) -> Result<(Params, Params), CliError> {
    if let Some(v) = config.remove("command") {
        if v.as_str() != Some(command) {
            return Err(CliError::Validation(format!("config is for command {v}, not {command:?}")));
        }
    }
    let globals = GLOBAL_KEYS.iter().filter_map(|&k| config.remove(k).map(|v| (k.to_string(), v))).collect();
    Ok((globals, config))
}
