//! Flat key-value experiment configuration.
//!
//! Files hold one `key = value` pair per line; `#` starts a comment. CLI
//! flags override file values. Every command validates its key set, so a
//! misspelled key fails loudly instead of silently using a default.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

/// Seed used when neither the config file nor the flags provide one.
/// Seeding is always explicit or this constant; never the wall clock.
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_THREADS: usize = 1;

#[derive(Debug, Clone, Default)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn empty() -> Config {
        Config::default()
    }

    pub fn from_file(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_contents(&text)
    }

    pub fn from_str_contents(text: &str) -> Result<Config, CliError> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { map })
    }

    /// Set (or override) a key.
    pub fn set(&mut self, key: &str, value: String) {
        self.map.insert(key.to_string(), value);
    }

    /// Error on any key outside the command's accepted set.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown config key `{key}` (accepted: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("key `{key}`: `{v}` is not a u64"))),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("key `{key}`: `{v}` is not an integer"))),
        }
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("key `{key}`: `{v}` is not a number"))),
        }
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.map.get(key).map(|s| s.as_str()) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(CliError::Config(format!(
                "key `{key}`: `{v}` is not a bool"
            ))),
        }
    }

    /// Grid-valued key: either a comma list or `lo:hi:count`.
    pub fn get_grid(&self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        let spec = self.map.get(key).map(|s| s.as_str()).unwrap_or(default);
        parse_grid(spec).map_err(|e| CliError::Config(format!("key `{key}`: {e}")))
    }

    pub fn get_usize_list(&self, key: &str, default: &str) -> Result<Vec<usize>, CliError> {
        let spec = self.map.get(key).map(|s| s.as_str()).unwrap_or(default);
        let list: Result<Vec<usize>, _> = spec
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<usize>())
            .collect();
        let list = list.map_err(|_| {
            CliError::Config(format!("key `{key}`: `{spec}` is not an integer list"))
        })?;
        if list.is_empty() {
            return Err(CliError::Config(format!("key `{key}`: empty list")));
        }
        Ok(list)
    }

    /// Weighted atoms: `theta:weight` pairs separated by commas.
    pub fn get_atoms(&self, key: &str, default: &str) -> Result<Vec<(f64, f64)>, CliError> {
        let spec = self.map.get(key).map(|s| s.as_str()).unwrap_or(default);
        let mut atoms = Vec::new();
        for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
            let Some((theta, weight)) = part.split_once(':') else {
                return Err(CliError::Config(format!(
                    "key `{key}`: expected `theta:weight`, got `{part}`"
                )));
            };
            let theta: f64 = theta
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("key `{key}`: bad theta in `{part}`")))?;
            let weight: f64 = weight
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("key `{key}`: bad weight in `{part}`")))?;
            atoms.push((theta, weight));
        }
        if atoms.is_empty() {
            return Err(CliError::Config(format!(
                "key `{key}`: no atoms in `{spec}`"
            )));
        }
        Ok(atoms)
    }

    /// One deterministic comment line echoing the effective configuration.
    pub fn echo_line(&self, command: &str) -> String {
        let mut line = format!("# config: command={command}");
        for (k, v) in &self.map {
            let _ = write!(line, " {k}={v}");
        }
        line.push('\n');
        line
    }
}

/// Parse `a,b,c` or `lo:hi:count` (inclusive endpoints) into a float grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty grid".into());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("`{spec}` is not `lo:hi:count`"));
        }
        let lo: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| format!("bad lo in `{spec}`"))?;
        let hi: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| format!("bad hi in `{spec}`"))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad count in `{spec}`"))?;
        if count == 0 {
            return Err("grid count must be positive".into());
        }
        if count == 1 {
            return Ok(vec![lo]);
        }
        if hi.is_nan() || lo.is_nan() || hi <= lo {
            return Err(format!("need hi > lo in `{spec}`"));
        }
        let step = (hi - lo) / (count - 1) as f64;
        return Ok((0..count).map(|i| lo + step * i as f64).collect());
    }
    let values: Result<Vec<f64>, _> = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect();
    let values = values.map_err(|_| format!("`{spec}` is not a number list"))?;
    if values.is_empty() {
        return Err("empty grid".into());
    }
    Ok(values)
}
