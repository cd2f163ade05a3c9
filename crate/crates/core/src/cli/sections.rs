//! Line-oriented `[section arg]` / `key = value` text shared by the
//! building and case files. `#` starts a comment.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Section {
    pub kind: String,
    pub arg: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

pub(crate) struct Source<'a> {
    pub path: &'a str,
}

impl Source<'_> {
    pub fn error(&self, line: usize, field: &str, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_string(),
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Vec<Section>> {
        let mut sections: Vec<Section> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(inner) = content.strip_prefix('[') {
                let inner = inner
                    .strip_suffix(']')
                    .ok_or_else(|| self.error(line, "section", "missing closing `]`"))?;
                let mut words = inner.split_whitespace();
                let kind = words
                    .next()
                    .ok_or_else(|| self.error(line, "section", "empty section header"))?;
                let arg = words.next().map(str::to_string);
                if words.next().is_some() {
                    return Err(self.error(line, kind, "section name must be a single word"));
                }
                sections.push(Section {
                    kind: kind.to_string(),
                    arg,
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| self.error(line, "line", "expected `key = value`"))?;
            let key = key.trim();
            let section = sections
                .last_mut()
                .ok_or_else(|| self.error(line, key, "entry outside of any section"))?;
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(sections)
    }

    pub fn value<T: FromStr>(&self, e: &Entry) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        e.value
            .parse()
            .map_err(|err| self.error(e.line, &e.key, format!("`{}`: {err}", e.value)))
    }

    pub fn number(&self, e: &Entry) -> Result<f64> {
        let v: f64 = self.value(e)?;
        if !v.is_finite() {
            return Err(self.error(e.line, &e.key, "value must be finite"));
        }
        Ok(v)
    }
}

/// Collects single-valued keys and rejects duplicates and unknown keys.
pub(crate) struct Fields<'s> {
    entries: Vec<(&'static str, Option<&'s Entry>)>,
    section_line: usize,
    section_name: String,
}

impl<'s> Fields<'s> {
    pub fn collect(
        src: &Source,
        section: &'s Section,
        single: &[&'static str],
        repeated: &[&'static str],
    ) -> Result<(Self, Vec<&'s Entry>)> {
        let mut entries: Vec<(&'static str, Option<&Entry>)> =
            single.iter().map(|k| (*k, None)).collect();
        let mut multi = Vec::new();
        for e in &section.entries {
            if repeated.contains(&e.key.as_str()) {
                multi.push(e);
                continue;
            }
            match entries.iter_mut().find(|(k, _)| *k == e.key) {
                Some((_, slot @ None)) => *slot = Some(e),
                Some((_, Some(_))) => {
                    return Err(src.error(e.line, &e.key, "duplicate key"));
                }
                None => return Err(src.error(e.line, &e.key, "unknown key")),
            }
        }
        let section_name = match &section.arg {
            Some(a) => format!("{} {a}", section.kind),
            None => section.kind.clone(),
        };
        Ok((
            Self {
                entries,
                section_line: section.line,
                section_name,
            },
            multi,
        ))
    }

    pub fn get(&self, key: &str) -> Option<&'s Entry> {
        self.entries.iter().find(|(k, _)| *k == key).and_then(|(_, e)| *e)
    }

    pub fn require(&self, src: &Source, key: &str) -> Result<&'s Entry> {
        self.get(key).ok_or_else(|| {
            src.error(
                self.section_line,
                key,
                format!("missing in [{}]", self.section_name),
            )
        })
    }
}
