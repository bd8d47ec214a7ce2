//! Parameter grids: a base experiment plus `sweep` axes that overwrite
//! fields by dotted path. Points run in row-major order, first axis outermost.

use serde::Deserialize;
use serde_json::Value;

use crate::config::{from_value, ExperimentConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

pub struct SweepPlan {
    pub axes: Vec<Axis>,
    base: Value,
}

pub struct Point {
    pub key: Vec<String>,
    pub config: ExperimentConfig,
}

impl SweepPlan {
    pub fn parse(mut doc: Value) -> Result<Self, CliError> {
        let obj = doc
            .as_object_mut()
            .ok_or_else(|| CliError::Config("sweep config must be a JSON object".into()))?;
        let axes = obj
            .remove("sweep")
            .ok_or_else(|| CliError::Config("sweep: missing field".into()))?;
        let axes: Vec<Axis> = from_value(axes, "sweep")?;
        if axes.is_empty() {
            return Err(CliError::Config("sweep: at least one axis required".into()));
        }
        for (i, a) in axes.iter().enumerate() {
            if a.values.is_empty() {
                return Err(CliError::Config(format!("sweep[{i}].values: empty")));
            }
        }
        Ok(SweepPlan { axes, base: doc })
    }

    pub fn points(&self) -> Result<Vec<Point>, CliError> {
        let mut index = vec![0usize; self.axes.len()];
        let mut out = Vec::new();
        loop {
            let mut doc = self.base.clone();
            let mut key = Vec::with_capacity(index.len());
            for (axis, &k) in self.axes.iter().zip(&index) {
                let v = &axis.values[k];
                set_path(&mut doc, &axis.path, v.clone())?;
                key.push(match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                });
            }
            let origin = format!("sweep point {}", key.join(","));
            out.push(Point {
                key,
                config: from_value(doc, &origin)?,
            });
            // odometer, last axis fastest
            let mut d = index.len();
            loop {
                if d == 0 {
                    return Ok(out);
                }
                d -= 1;
                index[d] += 1;
                if index[d] < self.axes[d].values.len() {
                    break;
                }
                index[d] = 0;
            }
        }
    }
}

/// Sets `a.b.2.c`; intermediate objects and arrays must exist, the last key may be new.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<(), CliError> {
    let bad = |why: &str| CliError::Config(format!("sweep path `{path}`: {why}"));
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(bad("empty segment"));
    }
    let (last, parents) = parts.split_last().expect("nonempty");
    let mut cur = doc;
    for p in parents {
        cur = match cur {
            Value::Object(m) => m.get_mut(*p).ok_or_else(|| bad(&format!("no field `{p}`")))?,
            Value::Array(a) => {
                let i: usize = p.parse().map_err(|_| bad(&format!("`{p}` is not an index")))?;
                a.get_mut(i).ok_or_else(|| bad(&format!("index {i} out of range")))?
            }
            _ => return Err(bad(&format!("cannot descend into `{p}`"))),
        };
    }
    match cur {
        Value::Object(m) => {
            m.insert(last.to_string(), value);
        }
        Value::Array(a) => {
            let i: usize = last.parse().map_err(|_| bad(&format!("`{last}` is not an index")))?;
            *a.get_mut(i).ok_or_else(|| bad(&format!("index {i} out of range")))? = value;
        }
        _ => return Err(bad("parent is not an object or array")),
    }
    Ok(())
}
