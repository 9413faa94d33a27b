use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use homcx::{Error, Result};

/// Settings from `key = value` lines; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub budget: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub chromatic_limit: Option<usize>,
    pub no_cache: bool,
}

pub const KEYS: &[&str] = &["budget", "cache_dir", "chromatic_limit", "no_cache"];

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let mut raw = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(Error::Parse(format!("config line {}: unknown key `{k}`", i + 1)));
            }
            raw.insert(k.to_string(), v.trim().to_string());
        }
        let num = |k: &str| -> Result<Option<usize>> {
            raw.get(k)
                .map(|v| match v.replace('_', "").parse::<usize>() {
                    Ok(0) | Err(_) => Err(Error::Parse(format!("config `{k}` must be a positive integer"))),
                    Ok(n) => Ok(n),
                })
                .transpose()
        };
        let no_cache = match raw.get("no_cache").map(String::as_str) {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(v) => return Err(Error::Parse(format!("config `no_cache` must be true or false, got `{v}`"))),
        };
        Ok(Config {
            budget: num("budget")?,
            cache_dir: raw.get("cache_dir").map(PathBuf::from),
            chromatic_limit: num("chromatic_limit")?,
            no_cache,
        })
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::arg(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    /// Values set in `over` win.
    pub fn overlay(self, over: Config) -> Config {
        Config {
            budget: over.budget.or(self.budget),
            cache_dir: over.cache_dir.or(self.cache_dir),
            chromatic_limit: over.chromatic_limit.or(self.chromatic_limit),
            no_cache: over.no_cache || self.no_cache,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_overlay() {
        let c = Config::parse("# budgets\nbudget = 1_000\ncache_dir=/tmp/x\n").unwrap();
        assert_eq!(c.budget, Some(1000));
        let f = c.overlay(Config { budget: Some(5), ..Default::default() });
        assert_eq!((f.budget, f.cache_dir.as_deref()), (Some(5), Some(Path::new("/tmp/x"))));
        assert!(Config::parse("colour = red").is_err());
        assert!(Config::parse("budget = 0").is_err());
    }
}
