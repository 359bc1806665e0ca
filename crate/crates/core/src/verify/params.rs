//! `key=value` configuration with typed lookups.

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("parameter {key}: cannot parse {value:?}")]
    BadValue { key: String, value: String },
    #[error("unknown parameter {0:?} for suite {1}")]
    Unknown(String, String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a config file body; `#` starts a comment and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut p = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    text: raw.to_string(),
                });
            }
            p.set(k, v.trim());
        }
        Ok(p)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.0.insert(key.replace('-', "_"), value.to_string());
    }

    /// Later entries win.
    pub fn merged(&self, over: &Params) -> Params {
        let mut p = self.clone();
        for (k, v) in &over.0 {
            p.0.insert(k.clone(), v.clone());
        }
        p
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: key.into(),
                value: v.into(),
            }),
        }
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.parse().map_err(|_| ConfigError::BadValue {
                    key: key.into(),
                    value: v.into(),
                })
            })
            .transpose()
    }

    /// Comma-separated list.
    pub fn list<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse().map_err(|_| ConfigError::BadValue {
                        key: key.into(),
                        value: v.into(),
                    })
                })
                .collect(),
        }
    }

    pub fn flag(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.raw(key) {
            None => Ok(default),
            Some("1" | "true" | "yes" | "on") => Ok(true),
            Some("0" | "false" | "no" | "off") => Ok(false),
            Some(v) => Err(ConfigError::BadValue {
                key: key.into(),
                value: v.into(),
            }),
        }
    }

    /// Fails on any key outside `allowed`.
    pub fn check_keys(&self, suite: &str, allowed: &[&str]) -> Result<(), ConfigError> {
        for k in self.keys() {
            if !allowed.contains(&k) {
                return Err(ConfigError::Unknown(k.into(), suite.into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_files_and_overrides() {
        let p = Params::parse("# sweep\nq = 3,5\n\nk=12 # weight\nstage-d=false\n").unwrap();
        assert_eq!(p.list::<u64>("q", &[]).unwrap(), vec![3, 5]);
        assert_eq!(p.get::<u32>("k", 0).unwrap(), 12);
        assert!(!p.flag("stage_d", true).unwrap());
        let mut o = Params::new();
        o.set("k", "16");
        assert_eq!(p.merged(&o).get::<u32>("k", 0).unwrap(), 16);
        assert_eq!(p.get::<u32>("missing", 4).unwrap(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Params::parse("novalue"), Err(ConfigError::Syntax { line: 1, .. })));
        let p = Params::parse("k=twelve").unwrap();
        assert!(matches!(p.get::<u32>("k", 0), Err(ConfigError::BadValue { .. })));
        assert!(p.check_keys("petersson", &["q"]).is_err());
        assert!(p.check_keys("petersson", &["k"]).is_ok());
    }
}
