//! Flat key-value config files.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Keys are unique within a section. Matrix literals are row lists of complex
//! numbers written `re+imi`, for example `[[0, 1-0.5i], [1+0.5i, 2]]`; vector
//! literals are a single row, `[0.6, 0.8i]`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::linalg::{ComplexMatrix, C64};

use super::HarnessError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn err(line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Config { line, msg: msg.into() }
}

impl FromStr for Config {
    type Err = HarnessError;

    fn from_str(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Config::default();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                if !line.starts_with("[[") {
                    let name = rest
                        .strip_suffix(']')
                        .ok_or_else(|| err(line_no, "unterminated section header"))?
                        .trim();
                    if name.is_empty() {
                        return Err(err(line_no, "empty section name"));
                    }
                    cfg.sections.entry(name.to_owned()).or_default();
                    current = Some(name.to_owned());
                    continue;
                }
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected `key = value`, found `{line}`")))?;
            let section = current
                .as_ref()
                .ok_or_else(|| err(line_no, "key outside of any section"))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(err(line_no, "empty key"));
            }
            let entries = cfg.sections.get_mut(section).expect("section registered");
            if entries.insert(key.to_owned(), value.trim().to_owned()).is_some() {
                return Err(err(line_no, format!("duplicate key `{key}` in [{section}]")));
            }
        }
        Ok(cfg)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

impl Config {
    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    /// Inserts or replaces `section.key`.
    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        self.sections.entry(section.to_owned()).or_default().insert(key.to_owned(), value.to_owned());
    }

    pub fn remove(&mut self, section: &str, key: &str) -> Option<String> {
        self.sections.get_mut(section)?.remove(key)
    }

    pub fn keys(&self, section: &str) -> impl Iterator<Item = &str> {
        self.sections.get(section).into_iter().flat_map(|m| m.keys().map(String::as_str))
    }

    /// Rejects keys in `section` that are not in `allowed`.
    pub fn check_keys(&self, section: &str, allowed: &[&str]) -> Result<(), HarnessError> {
        match self.keys(section).find(|k| !allowed.contains(k)) {
            Some(k) => Err(HarnessError::InvalidSpec(format!("unknown key `{k}` in [{section}]"))),
            None => Ok(()),
        }
    }

    /// Parses `section.key` with `FromStr`, if present.
    pub fn parse<T>(&self, section: &str, key: &str) -> Result<Option<T>, HarnessError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(section, key)
            .map(|v| {
                v.parse::<T>().map_err(|e| HarnessError::InvalidSpec(format!("[{section}] {key}: {e}")))
            })
            .transpose()
    }
}

pub fn parse_complex(text: &str) -> Result<C64, String> {
    let t = text.trim();
    C64::from_str(t).map_err(|_| format!("invalid complex number `{t}`"))
}

/// `[z₀, z₁, …]`
pub fn parse_vector(text: &str) -> Result<Vec<C64>, String> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("vector literal must be bracketed: `{t}`"))?;
    if inner.contains('[') || inner.contains(']') {
        return Err(format!("nested brackets in vector literal `{t}`"));
    }
    if inner.trim().is_empty() {
        return Err("empty vector literal".into());
    }
    inner.split(',').map(parse_complex).collect()
}

/// `[[row₀], [row₁], …]`
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("matrix literal must be bracketed: `{t}`"))?;
    let mut rows = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        if !rest.starts_with('[') {
            return Err(format!("expected `[` at `{rest}`"));
        }
        let close = rest.find(']').ok_or("unterminated matrix row")?;
        rows.push(parse_vector(&rest[..=close])?);
        rest = rest[close + 1..].trim_start();
        if let Some(after) = rest.strip_prefix(',') {
            rest = after.trim_start();
        }
    }
    ComplexMatrix::from_rows(rows).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn parses_sections_and_comments() {
        let cfg: Config = "# top\n[sweep]\npreset = fig1 # inline\ncount = 5\n\n[optimizer]\nseed=3\n"
            .parse()
            .unwrap();
        assert_eq!(cfg.get("sweep", "preset"), Some("fig1"));
        assert_eq!(cfg.parse::<usize>("sweep", "count").unwrap(), Some(5));
        assert_eq!(cfg.parse::<u64>("optimizer", "seed").unwrap(), Some(3));
        assert_eq!(cfg.get("optimizer", "missing"), None);
        assert!(cfg.has_section("optimizer"));

        let mut cfg = cfg;
        cfg.set("sweep", "preset", "fig2");
        cfg.set("verify", "n", "3");
        assert_eq!(cfg.get("sweep", "preset"), Some("fig2"));
        assert_eq!(cfg.get("verify", "n"), Some("3"));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!("key = 1".parse::<Config>(), Err(HarnessError::Config { line: 1, .. })));
        assert!(matches!("[a]\nnovalue".parse::<Config>(), Err(HarnessError::Config { line: 2, .. })));
        assert!(matches!("[a]\nk=1\nk=2".parse::<Config>(), Err(HarnessError::Config { line: 3, .. })));
        assert!(matches!("[a".parse::<Config>(), Err(HarnessError::Config { .. })));
        let cfg: Config = "[a]\nn = x".parse().unwrap();
        assert!(cfg.parse::<usize>("a", "n").is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex(" -0.5i ").unwrap(), c(0.0, -0.5));
        assert_eq!(parse_complex("3").unwrap(), c(3.0, 0.0));
        assert_eq!(parse_complex("1e-3-2e1i").unwrap(), c(1e-3, -20.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn matrix_literals() {
        let m = parse_matrix("[[0, 1-0.5i], [1+0.5i, 2]]").unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m[(0, 1)], c(1.0, -0.5));
        assert_eq!(m[(1, 1)], c(2.0, 0.0));
        assert!(parse_matrix("[[1, 2], [3]]").is_err());
        assert!(parse_matrix("[1, 2]").is_err());
        assert_eq!(parse_vector("[0.6, 0.8i]").unwrap(), vec![c(0.6, 0.0), c(0.0, 0.8)]);
        assert!(parse_vector("[]").is_err());
    }

    #[test]
    fn unknown_keys() {
        let cfg: Config = "[verify]\nn = 3\nsede = 1\n".parse().unwrap();
        assert!(cfg.check_keys("verify", &["n", "seed"]).is_err());
        assert!(cfg.check_keys("verify", &["n", "sede"]).is_ok());
        assert!(cfg.check_keys("sweep", &[]).is_ok());
    }
}
