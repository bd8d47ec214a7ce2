use serde_json::{Map, Value};
use sscd_core::instances::GeneratorSpec;

use crate::config::from_value;
use crate::error::CliError;

/// Builds a generator spec from `kind` and `key=value` pairs. Values are read
/// as JSON when they parse, as strings otherwise.
pub fn spec_from_args(kind: &str, params: &[String]) -> Result<GeneratorSpec, CliError> {
    let mut obj = Map::new();
    for p in params {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("parameter `{p}`: expected key=value")))?;
        let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        obj.insert(k.to_string(), v);
    }
    let doc = serde_json::json!({"kind": kind, "params": obj});
    from_value(doc, "generator")
}
