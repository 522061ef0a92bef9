//! `key = value` config files, layered under command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "format",
    "out",
    "seed",
    "n",
    "member",
    "indices",
    "cap",
    "which",
    "exact",
    "tolerance",
    "variant",
    "starts",
    "inner-evals",
    "penalty-start",
    "penalty-end",
    "complex",
    "resolution",
    "n-max",
    "samples",
    "only",
    "tau",
    "state",
    "frame",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", no + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", no + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    /// The flag value if given, else the config value parsed as `T`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| CliError::Usage(format!("config key `{key}` = `{v}`: {e}"))),
        }
    }

    pub fn pick_or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    /// Boolean switches: set if the flag is present or the config says `true`.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Inclusive range `a..b`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl NRange {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(NRange { lo, hi })
    }
}

/// Comma-separated 1-based qubit indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Indices(pub Vec<usize>);

impl FromStr for Indices {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(Indices(Vec::new()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("index `{t}`: {e}")))
            .collect::<Result<_, _>>()
            .map(Indices)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!("2..6".parse::<NRange>().unwrap(), NRange { lo: 2, hi: 6 });
        assert_eq!("2..=6".parse::<NRange>().unwrap(), NRange { lo: 2, hi: 6 });
        assert_eq!("5".parse::<NRange>().unwrap(), NRange { lo: 5, hi: 5 });
        assert!("6..2".parse::<NRange>().is_err());
        assert!("a..2".parse::<NRange>().is_err());
    }

    #[test]
    fn config_layering() {
        let c = ConfigFile::parse("# comment\nseed = 7\nformat=csv\n\ninner_evals = 100 # trailing\n").unwrap();
        assert_eq!(c.pick::<u64>(None, "seed").unwrap(), Some(7));
        assert_eq!(c.pick(Some(9u64), "seed").unwrap(), Some(9));
        assert_eq!(c.pick::<usize>(None, "inner-evals").unwrap(), Some(100));
        assert_eq!(c.pick::<String>(None, "format").unwrap().as_deref(), Some("csv"));
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("seed").is_err());
        assert!(c.pick::<usize>(None, "format").is_err());
    }

    #[test]
    fn indices() {
        assert_eq!("1, 2,4".parse::<Indices>().unwrap(), Indices(vec![1, 2, 4]));
        assert!("1,x".parse::<Indices>().is_err());
    }
}
