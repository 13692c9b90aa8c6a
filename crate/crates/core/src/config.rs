//! Flat sectioned text configuration: `[section]` headers, one `key = value`
//! per line, `#` comments. Every value remembers its line so diagnostics can
//! point at it.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A nonnegative integer written plainly (`10000`, `10_000`) or in
/// scientific notation with an integral value (`1e4`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Count(pub u64);

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let clean: String = s.trim().chars().filter(|&c| c != '_').collect();
        if let Ok(v) = clean.parse::<u64>() {
            return Ok(Count(v));
        }
        match clean.parse::<f64>() {
            Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(Count(x as u64)),
            _ => Err(format!("`{s}` is not a nonnegative integer")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: String,
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigDoc {
    entries: Vec<Entry>,
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut entries: Vec<Entry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return Err(Error::Config { line, message: format!("unterminated section header `{content}`") });
                };
                section = name.trim().to_string();
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Config { line, message: format!("expected `key = value`, got `{content}`") });
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::Config { line, message: "empty key".into() });
            }
            if let Some(prev) = entries.iter().find(|e| e.section == section && e.key == key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}` (first set on line {})", prev.line),
                });
            }
            entries.push(Entry { section: section.clone(), key, value: value.trim().to_string(), line });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.section == section && e.key == key)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        let value = value.into();
        match self.entries.iter_mut().find(|e| e.section == section && e.key == key) {
            // An overridden value no longer comes from its file line.
            Some(e) => {
                e.value = value;
                e.line = 0;
            }
            None => self.entries.push(Entry { section: section.into(), key: key.into(), value, line: 0 }),
        }
    }

    pub fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|err| Error::Config {
                line: e.line,
                message: format!("[{section}] {key}: cannot parse `{}`: {err}", e.value),
            }),
        }
    }

    /// A [`Count`]-valued key.
    pub fn count(&self, section: &str, key: &str) -> Result<Option<u64>> {
        Ok(self.parsed::<Count>(section, key)?.map(|c| c.0))
    }

    pub fn required<T: FromStr>(&self, section: &str, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.parsed(section, key)?.ok_or_else(|| Error::Config {
            line: 0,
            message: format!("missing required key `{key}` in [{section}]"),
        })
    }

    /// Comma-separated list value.
    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(e) = self.get(section, key) else { return Ok(None) };
        e.value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>().map_err(|err| Error::Config {
                    line: e.line,
                    message: format!("[{section}] {key}: cannot parse `{s}`: {err}"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Errors on the first key in `section` that is not in `known`.
    pub fn reject_unknown(&self, section: &str, known: &[&str]) -> Result<()> {
        match self.entries.iter().find(|e| e.section == section && !known.contains(&e.key.as_str())) {
            Some(e) => Err(Error::Config { line: e.line, message: format!("unknown key `{}` in [{section}]", e.key) }),
            None => Ok(()),
        }
    }

    /// Renders the document with each section's keys grouped together,
    /// sections in order of first appearance.
    pub fn to_text(&self) -> String {
        let mut sections: Vec<&str> = Vec::new();
        for e in &self.entries {
            if !sections.contains(&e.section.as_str()) {
                sections.push(&e.section);
            }
        }
        let mut out = String::new();
        for (k, section) in sections.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            if !section.is_empty() {
                let _ = writeln!(out, "[{section}]");
            }
            for e in self.entries.iter().filter(|e| e.section == *section) {
                let _ = writeln!(out, "{} = {}", e.key, e.value);
            }
        }
        out
    }
}
