//! Flag/config resolution: a flat key → value map with command-line
//! precedence over the config file.
//!
//! Config files are line-oriented `key = value` with `#` comments; keys match
//! the long flag names. Range-valued keys use `start:stop:count`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    /// Loads the config file (when given), then overlays the CLI values.
    pub fn resolve(config: Option<&Path>, cli_pairs: Vec<(&'static str, Option<String>)>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::usage(format!(
                        "config {}:{}: expected `key = value`",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        for (k, v) in cli_pairs {
            if let Some(v) = v {
                map.insert(k.to_string(), v);
            }
        }
        Ok(Settings { map })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("--{key} '{s}': {e}"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|e| CliError::usage(format!("--{key} '{s}': {e}"))),
        }
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse()
                .map_err(|e| CliError::usage(format!("--{key} '{s}': {e}"))),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, CliError> {
        self.f64(key)?
            .ok_or_else(|| CliError::usage(format!("missing required flag --{key}")))
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.map.get("out").cloned().unwrap_or_else(|| ".".into()))
    }

    /// Output formats (comma list); default `csv,json`.
    pub fn formats(&self) -> Formats {
        let raw = self
            .map
            .get("format")
            .cloned()
            .unwrap_or_else(|| "csv,json".into());
        Formats {
            csv: raw.contains("csv"),
            json: raw.contains("json"),
            svg: raw.contains("svg"),
        }
    }

    /// A value that is either a single number or a `start:stop:count` range.
    pub fn values(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(s) = self.map.get(key) else {
            return Ok(None);
        };
        if let Some(r) = parse_range(s) {
            return Ok(Some(r?));
        }
        let v: f64 = s
            .parse()
            .map_err(|e| CliError::usage(format!("--{key} '{s}': {e}")))?;
        Ok(Some(vec![v]))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

fn parse_range(s: &str) -> Option<Result<Vec<f64>, CliError>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    let parse = |x: &str| -> Result<f64, CliError> {
        x.parse()
            .map_err(|e| CliError::usage(format!("range part '{x}': {e}")))
    };
    Some((|| {
        let start = parse(parts[0])?;
        let stop = parse(parts[1])?;
        let count: usize = parts[2]
            .parse()
            .map_err(|e| CliError::usage(format!("range count '{}': {e}", parts[2])))?;
        if count == 0 {
            return Err(CliError::usage("range count must be positive".into()));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        Ok((0..count)
            .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
            .collect())
    })())
}
