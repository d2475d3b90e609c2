//! Flat `key = value` run configuration. The file (when given) overrides
//! defaults and command-line flags override the file, so the merged map is the
//! resolved configuration that goes into the manifest.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use ccwf::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn empty() -> Self {
        Config::default()
    }

    /// Parse a config file: one `key = value` per line, `#` comments and blank
    /// lines ignored. Duplicate keys are rejected to catch copy-paste slips.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::invalid(format!("config line {}: expected key = value, got {raw:?}", i + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::invalid(format!("config line {}: empty key", i + 1)));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::invalid(format!("duplicate config key {k:?}")));
            }
        }
        Ok(Config { map })
    }

    /// Flag override: replaces any file value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.map.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::invalid(format!("config key {key} = {v:?}: {e}"))),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    /// Comma-separated list value.
    pub fn parse_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<T>().map_err(|e| {
                        Error::invalid(format!("config key {key}: bad entry {tok:?}: {e}"))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Reject unexpected keys so typos fail loudly instead of silently using a
    /// default.
    pub fn require_known(&self, allowed: &[&str]) -> Result<()> {
        for k in self.map.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::invalid(format!(
                    "unknown config key {k:?} (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Resolved key/value snapshot for the manifest.
    pub fn entries(&self) -> BTreeMap<String, String> {
        self.map.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_comments_blanks_and_overrides() {
        let f = write_tmp("# header\n\nn_reps = 7\nseed=42\n  weights = simple\n");
        let mut cfg = Config::load(f.path()).unwrap();
        assert_eq!(cfg.parse_or("n_reps", 0usize).unwrap(), 7);
        assert_eq!(cfg.parse_or("seed", 0u64).unwrap(), 42);
        assert_eq!(cfg.get("weights"), Some("simple"));
        cfg.set("seed", "9");
        assert_eq!(cfg.parse_or("seed", 0u64).unwrap(), 9);
        assert_eq!(cfg.parse_or("missing", 3.5f64).unwrap(), 3.5);
    }

    #[test]
    fn rejects_malformed_lines_and_duplicates() {
        let f = write_tmp("just words\n");
        assert!(Config::load(f.path()).is_err());
        let f = write_tmp("a = 1\na = 2\n");
        assert!(Config::load(f.path()).is_err());
        let f = write_tmp("= 1\n");
        assert!(Config::load(f.path()).is_err());
    }

    #[test]
    fn parse_errors_name_the_key() {
        let f = write_tmp("n_reps = soon\n");
        let cfg = Config::load(f.path()).unwrap();
        let err = cfg.parse::<usize>("n_reps").unwrap_err().to_string();
        assert!(err.contains("n_reps"), "{err}");
    }

    #[test]
    fn lists_and_known_keys() {
        let f = write_tmp("k_values = 2, 5,10\n");
        let cfg = Config::load(f.path()).unwrap();
        assert_eq!(cfg.parse_list::<usize>("k_values").unwrap().unwrap(), vec![2, 5, 10]);
        assert!(cfg.require_known(&["k_values"]).is_ok());
        assert!(cfg.require_known(&["other"]).is_err());
        assert!(cfg.parse_list::<usize>("missing").unwrap().is_none());
    }
}
