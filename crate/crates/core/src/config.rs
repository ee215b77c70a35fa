//! Plain-text `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Keys are dotted paths with optional indices, e.g. `car[0].vx` or
//! `reward.alpha`. Values keep their source line so that conversion
//! failures can point back at the offending line.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    file: String,
    line: usize,
}

#[derive(Debug, Default)]
pub struct KvFile {
    entries: BTreeMap<String, Entry>,
    used: RefCell<BTreeSet<String>>,
}

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '[' | ']' | '-'))
}

impl KvFile {
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                file: file.to_string(),
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            if !valid_key(key) {
                return Err(parse_err(format!("invalid key `{key}`")));
            }
            if value.is_empty() {
                return Err(parse_err(format!("missing value for `{key}`")));
            }
            let entry = Entry {
                value: value.to_string(),
                file: file.to_string(),
                line: line_no,
            };
            if entries.insert(key.to_string(), entry).is_some() {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            entries,
            used: RefCell::default(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Adds every entry of `defaults` whose key is not already present.
    pub fn merge_defaults(&mut self, defaults: KvFile) {
        for (k, v) in defaults.entries {
            self.entries.entry(k).or_insert(v);
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        let entry = self.entries.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(entry.value.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        self.used.borrow_mut().insert(key.to_string());
        entry.value.parse::<T>().map(Some).map_err(|_| Error::Parse {
            file: entry.file.clone(),
            line: entry.line,
            message: format!("cannot parse value `{}` for `{key}`", entry.value),
        })
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma separated list; an empty list is written as `-` or left blank.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        self.used.borrow_mut().insert(key.to_string());
        if entry.value == "-" {
            return Ok(Some(Vec::new()));
        }
        entry
            .value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>().map_err(|_| Error::Parse {
                    file: entry.file.clone(),
                    line: entry.line,
                    message: format!("cannot parse list item `{s}` for `{key}`"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Sorted distinct indices `i` appearing in keys of the form `prefix[i].…`.
    pub fn indices(&self, prefix: &str) -> Result<Vec<usize>> {
        let head = format!("{prefix}[");
        let mut out = BTreeSet::new();
        for (key, entry) in &self.entries {
            let Some(rest) = key.strip_prefix(&head) else {
                continue;
            };
            let idx = rest
                .split_once(']')
                .and_then(|(i, _)| i.parse::<usize>().ok())
                .ok_or_else(|| Error::Parse {
                    file: entry.file.clone(),
                    line: entry.line,
                    message: format!("malformed index in `{key}`"),
                })?;
            out.insert(idx);
        }
        Ok(out.into_iter().collect())
    }

    /// Fails on the first key nobody asked for, which is almost always a typo.
    pub fn ensure_all_used(&self) -> Result<()> {
        let used = self.used.borrow();
        match self.entries.iter().find(|(k, _)| !used.contains(*k)) {
            Some((key, entry)) => Err(Error::Parse {
                file: entry.file.clone(),
                line: entry.line,
                message: format!("unknown key `{key}`"),
            }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_indices() {
        let kv = KvFile::parse(
            "# header\ndt = 0.1 # step\ncar[0].vx = 11.1\ncar[1].x=-37\n\nped[0].y = -3\n",
            "t.cfg",
        )
        .unwrap();
        assert_eq!(kv.get::<f64>("dt").unwrap(), Some(0.1));
        assert_eq!(kv.indices("car").unwrap(), vec![0, 1]);
        assert_eq!(kv.indices("ped").unwrap(), vec![0]);
        assert_eq!(kv.get::<f64>("car[1].x").unwrap(), Some(-37.0));
    }

    #[test]
    fn reports_line_of_bad_value() {
        let kv = KvFile::parse("a = 1\nb = x\n", "t.cfg").unwrap();
        let err = kv.get::<f64>("b").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(
            KvFile::parse("ok = 1\nnonsense\n", "t.cfg"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(KvFile::parse("a = 1\na = 2\n", "t.cfg").is_err());
    }

    #[test]
    fn unused_keys_are_reported() {
        let kv = KvFile::parse("a = 1\ntypo = 2\n", "t.cfg").unwrap();
        let _ = kv.get::<f64>("a");
        assert!(kv.ensure_all_used().is_err());
        let _ = kv.get::<f64>("typo");
        assert!(kv.ensure_all_used().is_ok());
    }

    #[test]
    fn lists() {
        let kv = KvFile::parse("s = 1, 2,3\ne = -\n", "t.cfg").unwrap();
        assert_eq!(kv.get_list::<u64>("s").unwrap(), Some(vec![1, 2, 3]));
        assert_eq!(kv.get_list::<u64>("e").unwrap(), Some(vec![]));
    }

    #[test]
    fn defaults_do_not_override() {
        let mut main = KvFile::parse("a = 1\n", "m").unwrap();
        main.merge_defaults(KvFile::parse("a = 2\nb = 3\n", "d").unwrap());
        assert_eq!(main.get::<i32>("a").unwrap(), Some(1));
        assert_eq!(main.get::<i32>("b").unwrap(), Some(3));
    }
}
