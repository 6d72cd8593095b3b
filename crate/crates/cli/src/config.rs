//! `key = value` run files. Flags always win over file entries.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::CliError;

const KEYS: &[&str] = &[
    "epsilon",
    "sigma",
    "mass",
    "k",
    "k-min",
    "k-max",
    "k-count",
    "k-scale",
    "format",
    "output",
    "rel-tol",
    "max-rel-err",
    "input",
    "entropy",
    "energy",
    "gamma",
    "init-epsilon",
    "init-sigma",
    "max-iterations",
];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::usage(format!("{}: {e}", p.display())))?;
                Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {}", p.display(), e.message)))
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("line {}: expected key = value", n + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("line {}: unknown key '{key}'", n + 1)));
            }
            values.insert(key, value.trim().to_owned());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key).map(|v| parse_value(key, v)).transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.get(key).map(|v| parse_value(key, v)).transpose()
    }

    /// Comma-separated numbers.
    pub fn list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v.split(',').map(|x| parse_value(key, x.trim())).collect(),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::usage(format!("config key '{key}': cannot parse '{v}'")))
}
