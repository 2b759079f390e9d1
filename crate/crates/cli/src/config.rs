//! Versioned JSON config files and flag overlay.

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::exit::usage;

pub const SCHEMA: u64 = 1;

/// Parsed config document: global keys at the top level and one object per
/// verb (`"simulate": {...}`).
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    root: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))
            .map_err(|e| usage(format!("{e:#}")))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| usage(format!("config is not valid JSON: {e}")))?;
        let Value::Object(root) = value else {
            return Err(usage("config must be a JSON object"));
        };
        match root.get("schema").and_then(Value::as_u64) {
            Some(SCHEMA) => Ok(Self { root }),
            Some(other) => Err(usage(format!("unsupported config schema {other}"))),
            None => Err(usage("config needs \"schema\": 1")),
        }
    }

    /// Top-level keys other than the per-verb sections.
    pub fn globals(&self) -> Value {
        Value::Object(
            self.root
                .iter()
                .filter(|(_, v)| !v.is_object())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    pub fn section(&self, verb: &str) -> Value {
        self.root
            .get(verb)
            .cloned()
            .unwrap_or(Value::Object(Map::new()))
    }
}

/// Keys of `top` that are not null replace those of `base`.
pub fn overlay(base: &Value, top: &Value) -> Value {
    let mut merged = match base {
        Value::Object(map) => map.clone(),
        _ => Map::new(),
    };
    if let Value::Object(map) = top {
        for (k, v) in map {
            if !v.is_null() {
                merged.insert(k.clone(), v.clone());
            }
        }
    }
    Value::Object(merged)
}

/// Deserialize `T` from `base` overlaid with the non-null fields of `flags`.
pub fn merge<T: Serialize + DeserializeOwned>(base: &Value, flags: &T) -> Result<T> {
    let top = serde_json::to_value(flags).context("serializing flags")?;
    let merged = overlay(base, &top);
    serde_json::from_value(merged).map_err(|e| usage(format!("invalid configuration: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::SpectrumArgs;

    #[test]
    fn schema_is_required() {
        assert!(ConfigFile::parse("{}").is_err());
        assert!(ConfigFile::parse(r#"{"schema": 2}"#).is_err());
        assert!(ConfigFile::parse(r#"{"schema": 1}"#).is_ok());
        assert!(ConfigFile::parse("[1]").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = ConfigFile::parse(
            r#"{"schema": 1, "seed": 3, "spectrum": {"lambda": 0.5, "n_max": 2}}"#,
        )
        .unwrap();
        let flags = SpectrumArgs {
            n_max: Some(4),
            ..Default::default()
        };
        let merged: SpectrumArgs = merge(&file.section("spectrum"), &flags).unwrap();
        assert_eq!(merged.lambda, Some(0.5));
        assert_eq!(merged.n_max, Some(4));
        assert_eq!(file.globals()["seed"], 3);
    }

    #[test]
    fn wrong_types_are_usage_errors() {
        let base = serde_json::json!({"n_max": "many"});
        let err = merge(&base, &SpectrumArgs::default()).unwrap_err();
        assert_eq!(crate::exit::code_of(&err), crate::exit::USAGE);
    }
}
