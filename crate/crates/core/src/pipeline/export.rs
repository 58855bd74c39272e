//! JSON and DOT renderings of a lattice.

use std::fmt::Write;
use std::str::FromStr;

use thiserror::Error;

use super::{EdgeKind, EdgeStatus, Lattice};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("unknown format {0:?} (expected json or dot)")]
    UnknownFormat(String),
    #[error("bad lattice JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
}

impl FromStr for Format {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            _ => Err(ExportError::UnknownFormat(s.to_string())),
        }
    }
}

fn dot_style(k: EdgeKind) -> &'static str {
    match k {
        EdgeKind::EqualRank => "bold",
        EdgeKind::Visual => "solid",
        EdgeKind::SearchFound => "dashed",
        EdgeKind::CertificateImported => "dotted",
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic bytes for a lattice. DOT shows exists edges only, one
/// line style per edge kind.
pub fn export(lattice: &Lattice, format: Format) -> Result<Vec<u8>, ExportError> {
    let mut l = lattice.clone();
    l.sort();
    match format {
        Format::Json => Ok(serde_json::to_vec(&l)?),
        Format::Dot => {
            let mut s = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
            for e in &l.entries {
                let _ = writeln!(s, "  \"{}\" [label=\"{}\"];", e.id, dot_escape(e.display_name()));
            }
            for e in l.edges.iter().filter(|e| e.status == EdgeStatus::Exists) {
                let _ = writeln!(s, "  \"{}\" -> \"{}\" [style={}];", e.sub, e.sup, dot_style(e.kind));
            }
            s.push_str("}\n");
            Ok(s.into_bytes())
        }
    }
}

/// Parse a JSON export (evidence documents are not part of it).
pub fn import_json(bytes: &[u8]) -> Result<Lattice, ExportError> {
    Ok(serde_json::from_slice(bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_lattice() {
        let l = Lattice::default();
        assert_eq!(export(&l, Format::Json).unwrap(), br#"{"entries":[],"edges":[]}"#);
        assert!("svg".parse::<Format>().is_err());
        let dot = String::from_utf8(export(&l, Format::Dot).unwrap()).unwrap();
        assert!(!dot.contains("->"));
    }
}
