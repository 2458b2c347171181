//! `survscan.conf`: `[section]` headers and `key = value` lines.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

pub const DEFAULT_CONFIG: &str = "survscan.conf";

#[derive(Debug, Default)]
pub struct ConfigFile {
    pub path: Option<PathBuf>,
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<ConfigFile, CliError> {
        let mut sections: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        let mut current = String::from("global");
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| CliError::Usage(format!("{}:{}: {msg}", path.display(), i + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| bad("unterminated section header"))?;
                current = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected 'key = value'"))?;
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                return Err(bad("empty key"));
            }
            sections
                .entry(current.clone())
                .or_default()
                .insert(key, (i + 1, v.trim().to_string()));
        }
        Ok(ConfigFile {
            path: Some(path.to_path_buf()),
            sections,
        })
    }

    /// `explicit` if given, else `./survscan.conf` when present.
    pub fn locate(explicit: Option<&Path>) -> Result<ConfigFile, CliError> {
        let path = match explicit {
            Some(p) => p.to_path_buf(),
            None => {
                let p = PathBuf::from(DEFAULT_CONFIG);
                if !p.is_file() {
                    return Ok(ConfigFile::default());
                }
                p
            }
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        ConfigFile::parse(&text, &path)
    }

    pub fn section<'a>(&'a self, name: &str) -> Settings<'a> {
        Settings {
            name: name.to_string(),
            path: self.path.as_deref(),
            values: self.sections.get(name),
            used: RefCell::new(BTreeSet::new()),
            resolved: RefCell::new(BTreeMap::new()),
        }
    }
}

/// Resolves options for one subcommand: flag, then config, then default.
pub struct Settings<'a> {
    name: String,
    path: Option<&'a Path>,
    values: Option<&'a BTreeMap<String, (usize, String)>>,
    used: RefCell<BTreeSet<String>>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Settings<'_> {
    fn from_config<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let Some((line, raw)) = self.values.and_then(|v| v.get(key)) else {
            return Ok(None);
        };
        raw.parse::<T>().map(Some).map_err(|e| {
            CliError::Usage(format!(
                "{}:{line}: [{}] {key} = '{raw}': {e}",
                self.path.map(|p| p.display().to_string()).unwrap_or_default(),
                self.name
            ))
        })
    }

    pub fn opt<T: FromStr + Display>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        self.used.borrow_mut().insert(key.to_string());
        let v = match flag {
            Some(v) => Some(v),
            None => self.from_config(key)?,
        };
        if let Some(v) = &v {
            self.resolved.borrow_mut().insert(key.to_string(), v.to_string());
        }
        Ok(v)
    }

    pub fn get<T: FromStr + Display>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let v = self.opt(key, flag)?.unwrap_or(default);
        self.resolved.borrow_mut().insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// Errors on config keys no option asked for.
    pub fn finish(&self) -> Result<BTreeMap<String, String>, CliError> {
        if let Some(values) = self.values {
            let used = self.used.borrow();
            if let Some((k, (line, _))) = values.iter().find(|(k, _)| !used.contains(*k)) {
                return Err(CliError::Usage(format!(
                    "{}:{line}: unknown key '{k}' in section [{}]",
                    self.path.map(|p| p.display().to_string()).unwrap_or_default(),
                    self.name
                )));
            }
        }
        Ok(self.resolved.borrow().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config() {
        let cfg = ConfigFile::parse("[dsm]\ncell = 0.1\nmax_ring = 2 # comment\n", Path::new("c")).unwrap();
        let s = cfg.section("dsm");
        assert_eq!(s.get("cell", Some(0.5), 0.05).unwrap(), 0.5);
        assert_eq!(s.get("max-ring", None, 3usize).unwrap(), 2);
        let r = s.finish().unwrap();
        assert_eq!(r["cell"], "0.5");
        assert_eq!(r["max-ring"], "2");
    }

    #[test]
    fn unknown_and_malformed_keys_are_rejected() {
        let cfg = ConfigFile::parse("[dsm]\ncel = 0.1\n", Path::new("c")).unwrap();
        let s = cfg.section("dsm");
        s.get("cell", None, 0.05).unwrap();
        assert!(s.finish().is_err());
        let cfg = ConfigFile::parse("[dsm]\ncell = wide\n", Path::new("c")).unwrap();
        assert!(cfg.section("dsm").get("cell", None, 0.05).is_err());
        assert!(ConfigFile::parse("[dsm\n", Path::new("c")).is_err());
    }
}
