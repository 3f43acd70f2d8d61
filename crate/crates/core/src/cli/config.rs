//! Flat `key = value` configuration files and their translation into
//! command-line flags.

use std::ffi::OsString;
use std::path::Path;

use indexmap::IndexMap;
use serde::Serialize;

use super::CliError;

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// ignored; later keys replace earlier ones.
pub fn parse_config(text: &str, name: &str) -> Result<IndexMap<String, String>, CliError> {
    let mut map = IndexMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{name}:{}: expected key = value", n + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(CliError::Usage(format!("{name}:{}: empty key", n + 1)));
        }
        map.insert(key.to_owned(), value.trim().to_owned());
    }
    Ok(map)
}

pub fn read_config(path: &Path) -> Result<IndexMap<String, String>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Input(crate::Error::io(path, e)))?;
    parse_config(&text, &path.display().to_string())
}

/// Flags for every entry whose key the user did not already pass.
/// `true` becomes a bare switch and `false` is dropped.
pub fn config_flags(config: &IndexMap<String, String>, user_args: &[OsString]) -> Vec<OsString> {
    let given = |key: &str| {
        let flag = format!("--{key}");
        let prefix = format!("--{key}=");
        user_args.iter().any(|a| {
            a.to_str()
                .is_some_and(|a| a == flag || a.starts_with(&prefix))
        })
    };
    let mut out = Vec::new();
    for (key, value) in config {
        if key == "config" || given(key) {
            continue;
        }
        match value.as_str() {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    out
}

/// Flattens serialized arguments into the `key -> value` form used by
/// config files and manifests. `None` fields are omitted.
pub fn flatten<T: Serialize>(args: &T) -> IndexMap<String, String> {
    let value = serde_json::to_value(args).expect("arguments serialize");
    let mut map = IndexMap::new();
    if let serde_json::Value::Object(fields) = value {
        for (key, v) in fields {
            let text = match v {
                serde_json::Value::Null => continue,
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            map.insert(key, text);
        }
    }
    map
}
