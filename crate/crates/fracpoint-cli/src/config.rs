//! Config-file support: plain `key = value` lines, `#` comments, blank
//! lines ignored. Values from the file fill in flags the command line left
//! unset; flags always win.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "config `{}` line {}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                ))
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Fill an unset option from the config, parsing the stored string.
    pub fn fill<T: std::str::FromStr>(
        &self,
        slot: &mut Option<T>,
        key: &str,
    ) -> Result<(), CliError> {
        if slot.is_none() {
            if let Some(raw) = self.get(key) {
                let parsed = raw.parse::<T>().map_err(|_| {
                    CliError::Validation(format!("config key `{key}`: cannot parse `{raw}`"))
                })?;
                *slot = Some(parsed);
            }
        }
        Ok(())
    }

    /// The config may pin the experiment name; it must then match the
    /// subcommand actually invoked.
    pub fn check_experiment(&self, name: &str) -> Result<(), CliError> {
        if let Some(expected) = self.get("experiment") {
            if expected != name {
                return Err(CliError::Validation(format!(
                    "config is for experiment `{expected}` but `{name}` was invoked"
                )));
            }
        }
        Ok(())
    }
}
