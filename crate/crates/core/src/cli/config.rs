use std::collections::{BTreeMap, HashMap};
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::CliError;

/// Flat `key = value` settings with `#` comments. Keys match the long flag
/// names; `_` and `-` are interchangeable. Every value actually used is
/// echoed into JSON reports.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: HashMap<String, String>,
    echo: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        text.parse()
    }

    /// The flag if given, else the config value, parsed.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.values.get(key) {
                Some(raw) => Some(raw.parse::<T>().map_err(|e| CliError::Invalid {
                    key: key.into(),
                    value: raw.clone(),
                    message: e.to_string(),
                })?),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.echo.insert(key.into(), v.to_string());
        }
        Ok(value)
    }

    pub fn req<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.get(key, flag)?.ok_or_else(|| CliError::Missing(key.into()))
    }

    /// Settings that were read, in key order.
    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.echo
    }
}

impl FromStr for Settings {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::ConfigSyntax {
                line: i + 1,
                message: format!("expected `key = value`, found {line:?}"),
            })?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(CliError::ConfigSyntax { line: i + 1, message: "empty key".into() });
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::ConfigSyntax { line: i + 1, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(Settings { values, echo: BTreeMap::new() })
    }
}
