//! Flat key=value configuration files. Keys are the long flag names of the
//! subcommand being run; flags always win over file values.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    /// Loads the file when given; `# comments` and blank lines are skipped.
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut values = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config {} line {}: expected key=value", path.display(), idx + 1);
            };
            values.insert(key.trim().to_owned(), value.trim().to_owned());
        }
        Ok(FileConfig { values })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => match raw.parse() {
                Ok(value) => Ok(Some(value)),
                Err(error) => bail!("config key {key}: {error}"),
            },
        }
    }

    /// Flag value, else config value, else the default.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(value) = flag {
            return Ok(value);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Required path: flag value or config value, otherwise an error naming
    /// both spellings.
    pub fn require_path(&self, flag: Option<PathBuf>, key: &str) -> Result<PathBuf> {
        if let Some(path) = flag {
            return Ok(path);
        }
        if let Some(raw) = self.values.get(key) {
            return Ok(PathBuf::from(raw));
        }
        bail!("missing --{key} (or config key {key})");
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.values.get(key).map(PathBuf::from))
    }
}
