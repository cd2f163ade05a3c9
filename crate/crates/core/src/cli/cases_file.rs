//! Verification case file.
//!
//! ```text
//! [measured]
//! nodes = east_wall:inside door:inside 17   # labels or node numbers
//!
//! [case 1]
//! target = component.door.layer.1.conductivity
//! base = 0.23
//! perturbed = 0.78
//! ```
//!
//! Targets are `component.<name>.layer.<k>.conductivity`,
//! `component.<name>.alpha` and `interior.h_ci`. The `[measured]` section is
//! optional; without it the caller picks the sensor set.

use std::fmt::Write as _;
use std::path::Path;

use super::sections::{Fields, Source};
use crate::error::{Error, Result};
use crate::model::{NodalModel, NodeId};
use crate::verify::{DefectSpec, DefectTarget};

/// A measured node given by number or by node label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeRef {
    Id(NodeId),
    Label(String),
}

impl NodeRef {
    pub fn resolve(&self, model: &NodalModel) -> Result<NodeId> {
        match self {
            NodeRef::Id(id) if id.0 >= 1 && id.0 <= model.node_count() => Ok(*id),
            NodeRef::Id(id) => Err(Error::NodeOutOfRange {
                node: *id,
                count: model.node_count(),
            }),
            NodeRef::Label(l) => model
                .find_by_label(l)
                .ok_or_else(|| Error::InvalidConfig(format!("no node labelled `{l}`"))),
        }
    }
}

impl std::fmt::Display for NodeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeRef::Id(id) => write!(f, "{id}"),
            NodeRef::Label(l) => f.write_str(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaseFile {
    pub measured: Option<Vec<NodeRef>>,
    pub cases: Vec<DefectSpec>,
}

pub fn parse_cases(text: &str, path: &str) -> Result<CaseFile> {
    let src = Source { path };
    let mut file = CaseFile::default();
    for section in src.parse(text)? {
        match section.kind.as_str() {
            "case" => {
                let id = section
                    .arg
                    .clone()
                    .ok_or_else(|| src.error(section.line, "case", "case needs an id"))?;
                if file.cases.iter().any(|c| c.id == id) {
                    return Err(src.error(section.line, "case", format!("duplicate case `{id}`")));
                }
                let (f, _) = Fields::collect(&src, &section, &["target", "base", "perturbed"], &[])?;
                let target_entry = f.require(&src, "target")?;
                let target: DefectTarget = target_entry
                    .value
                    .parse()
                    .map_err(|e: Error| src.error(target_entry.line, "target", e.to_string()))?;
                let spec = DefectSpec::new(
                    id,
                    target,
                    src.number(f.require(&src, "base")?)?,
                    src.number(f.require(&src, "perturbed")?)?,
                );
                spec.validate()
                    .map_err(|e| src.error(section.line, "case", e.to_string()))?;
                file.cases.push(spec);
            }
            "measured" => {
                if file.measured.is_some() {
                    return Err(src.error(section.line, "measured", "duplicate [measured] section"));
                }
                let (f, _) = Fields::collect(&src, &section, &["nodes"], &[])?;
                let e = f.require(&src, "nodes")?;
                let nodes: Vec<NodeRef> = e
                    .value
                    .split_whitespace()
                    .map(|w| match w.parse::<usize>() {
                        Ok(k) => NodeRef::Id(NodeId(k)),
                        Err(_) => NodeRef::Label(w.to_string()),
                    })
                    .collect();
                if nodes.is_empty() {
                    return Err(src.error(e.line, "nodes", "empty node list"));
                }
                file.measured = Some(nodes);
            }
            other => return Err(src.error(section.line, other, "unknown section")),
        }
    }
    if file.cases.is_empty() {
        return Err(src.error(1, "case", "no [case] section"));
    }
    Ok(file)
}

pub fn read_cases(path: &Path) -> Result<CaseFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_cases(&text, &path.display().to_string())
}

pub fn write_cases(file: &CaseFile) -> String {
    let mut out = String::new();
    if let Some(nodes) = &file.measured {
        let words: Vec<String> = nodes.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "[measured]\nnodes = {}\n", words.join(" "));
    }
    for (i, c) in file.cases.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[case {}]", c.id);
        let _ = writeln!(out, "target = {}", c.target);
        let _ = writeln!(out, "base = {}", c.base);
        let _ = writeln!(out, "perturbed = {}", c.perturbed);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::default_cases;

    #[test]
    fn round_trip() {
        let file = CaseFile {
            measured: Some(vec![NodeRef::Label("door:inside".into()), NodeRef::Id(NodeId(17))]),
            cases: default_cases(),
        };
        assert_eq!(parse_cases(&write_cases(&file), "c.txt").unwrap(), file);
    }

    #[test]
    fn bad_target_reports_line() {
        let text = "[case a]\ntarget = component.door.colour\nbase = 1\nperturbed = 2\n";
        match parse_cases(text, "c.txt").unwrap_err() {
            Error::Parse { line, field, .. } => assert_eq!((line, field.as_str()), (2, "target")),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn equal_values_rejected() {
        let text = "[case a]\ntarget = interior.h_ci\nbase = 5\nperturbed = 5\n";
        assert!(parse_cases(text, "c.txt").is_err());
        assert!(parse_cases("", "c.txt").is_err());
    }
}
