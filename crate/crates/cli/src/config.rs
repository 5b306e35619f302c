//! Flat JSON config files merged under command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{usage, CliResult};

/// Keys shared by every command; everything else belongs to the command.
pub const COMMON_KEYS: [&str; 4] = ["command", "seed", "output", "threads"];

pub fn read_config_file(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(usage(format!(
            "config {} must be a flat JSON object",
            path.display()
        ))),
        Err(e) => Err(usage(format!(
            "config {} is not valid JSON: {e}",
            path.display()
        ))),
    }
}

fn to_object<T: Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

/// Checks one key in isolation so the error names it.
fn check_key<T: DeserializeOwned>(key: &str, value: &Value) -> CliResult<()> {
    let mut single = Map::new();
    single.insert(key.to_string(), value.clone());
    serde_json::from_value::<T>(Value::Object(single))
        .map(|_| ())
        .map_err(|e| {
            let msg = e.to_string();
            if msg.starts_with("unknown field") {
                usage(format!("unknown key `{key}`"))
            } else {
                usage(format!("invalid value for key `{key}`: {msg}"))
            }
        })
}

/// `defaults` < config file < command-line flags. Keys named in
/// [`COMMON_KEYS`] are skipped here.
pub fn merge<T: Serialize + DeserializeOwned>(
    defaults: &T,
    file: &Map<String, Value>,
    cli: &T,
) -> CliResult<T> {
    let mut merged = to_object(defaults);
    for (k, v) in file {
        if COMMON_KEYS.contains(&k.as_str()) {
            continue;
        }
        check_key::<T>(k, v)?;
        merged.insert(k.clone(), v.clone());
    }
    for (k, v) in to_object(cli) {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| usage(e.to_string()))
}

/// Unwraps a resolved field, naming it when absent.
pub fn required<T: Clone>(value: &Option<T>, key: &str) -> CliResult<T> {
    value
        .clone()
        .ok_or_else(|| usage(format!("missing required key `{key}`")))
}
