//! JSON config files. Keys are the long flag names with `_` for `-`, plus
//! `out` and `timings`; a flag given on the command line wins.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Global;

pub const DEFAULT_OUT: &str = "geodesy-out";

pub struct Resolved<T> {
    pub opts: T,
    pub out: PathBuf,
    pub timings: bool,
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

/// Merges command-line options over the config file named by `--config`.
/// Unset flags serialize as `null` or `false` and do not override.
pub fn resolve<T: Serialize + DeserializeOwned>(global: &Global, flags: T) -> Result<Resolved<T>> {
    let mut file = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            match serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))? {
                Value::Object(m) => m,
                _ => bail!("config {} must hold a JSON object", path.display()),
            }
        }
        None => Map::new(),
    };

    let out = match (&global.out, file.remove("out")) {
        (Some(p), _) => p.clone(),
        (None, Some(Value::String(s))) => PathBuf::from(s),
        (None, Some(v)) => bail!("config key out must be a string, got {v}"),
        (None, None) => PathBuf::from(DEFAULT_OUT),
    };
    let timings = match file.remove("timings") {
        Some(Value::Bool(b)) => global.timings || b,
        Some(v) => bail!("config key timings must be a boolean, got {v}"),
        None => global.timings,
    };

    let known = object(serde_json::to_value(&flags)?);
    if let Some(key) = file.keys().find(|k| !known.contains_key(*k)) {
        bail!("unknown config key {key:?}");
    }
    for (k, v) in known {
        if !(v.is_null() || v == Value::Bool(false)) {
            file.insert(k, v);
        }
    }
    let opts = serde_json::from_value(Value::Object(file)).context("invalid config value")?;
    Ok(Resolved { opts, out, timings })
}
