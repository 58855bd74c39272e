//! Catalog of diagrams keyed by a hash of their canonical form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagrams::{
    canonical_form, classify, crystallographic_variants, enumerate_simplicial, named_diagram, normalize_name,
    CoxeterDiagram, DiagramClass, DiagramError, DynkinDiagram, LabelSet, NAMED_DIAGRAMS,
};
use crate::lorentz::{Realization, VertexKind};

/// Triangle groups that appear in worked examples.
pub const NAMED_TRIANGLES: &[&str] = &["(0,0,2)", "(0,0,3)", "(0,2,4)", "(0,3,3)", "(3,4,4)", "(2,3,7)", "(3,3,7)"];

/// The rank-2 group with an ∞-edge (infinite dihedral group).
pub const RANK_TWO: &str = "[inf]";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("alias {alias} already names entry {existing}")]
    AliasConflict { alias: String, existing: String },
    #[error("no catalog entry for {0}")]
    Unknown(String),
    #[error("{0} matches more than one entry")]
    Ambiguous(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationMeta {
    pub dimension: usize,
    pub compact: bool,
    pub ideal_vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: String,
    /// The diagram in canonical vertex order.
    pub diagram: CoxeterDiagram,
    pub class: DiagramClass,
    pub aliases: Vec<String>,
    pub variants: Vec<DynkinDiagram>,
    pub realization: Option<RealizationMeta>,
}

impl CatalogEntry {
    pub fn new(d: &CoxeterDiagram) -> Self {
        let cf = canonical_form(d, None);
        let diagram = cf.diagram(d);
        let realization = Realization::new(&diagram, None).ok().map(|r| RealizationMeta {
            dimension: diagram.rank() - 1,
            compact: r.is_compact(),
            ideal_vertices: (0..r.rank()).filter(|&v| r.vertices[v].kind == VertexKind::Ideal).collect(),
        });
        CatalogEntry {
            id: diagram_id(d),
            class: classify(&diagram),
            variants: crystallographic_variants(&diagram),
            diagram,
            aliases: Vec::new(),
            realization,
        }
    }

    pub fn rank(&self) -> usize {
        self.diagram.rank()
    }

    /// First alias, or the id.
    pub fn display_name(&self) -> &str {
        self.aliases.first().map(String::as_str).unwrap_or(&self.id)
    }
}

/// 16 hex digits of SHA-256 over the canonical code; invariant under
/// vertex relabelling.
pub fn diagram_id(d: &CoxeterDiagram) -> String {
    let cf = canonical_form(d, None);
    let mut h = Sha256::new();
    h.update(b"coxeter");
    for c in &cf.code {
        h.update(c.to_le_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: BTreeMap<String, CatalogEntry>,
    aliases: BTreeMap<String, String>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Named diagrams, the example triangles, the rank-2 group and every
    /// enumerated simplex of rank 4..=max_rank (capped at 10).
    pub fn builtin(max_rank: usize) -> Self {
        let mut c = Catalog::new();
        let named = NAMED_DIAGRAMS.iter().chain(NAMED_TRIANGLES).chain(std::iter::once(&RANK_TWO));
        for name in named {
            let d = named_diagram(name).expect("built-in name");
            c.insert(&d, &[name]).expect("built-in aliases are distinct");
        }
        for rank in 4..=max_rank.min(10) {
            let mut found: Vec<(Vec<u32>, CoxeterDiagram)> = enumerate_simplicial(rank, &LabelSet::Unrestricted)
                .expect("rank in range")
                .into_iter()
                .map(|d| (canonical_form(&d, None).code, d))
                .collect();
            found.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, (_, d)) in found.iter().enumerate() {
                c.insert(d, &[&format!("r{rank}-{:02}", k + 1)]).expect("generated aliases are distinct");
            }
        }
        c
    }

    /// Add a diagram (or new aliases for an existing one); returns its id.
    pub fn insert(&mut self, d: &CoxeterDiagram, aliases: &[&str]) -> Result<String, CatalogError> {
        let id = diagram_id(d);
        for a in aliases {
            if let Some(existing) = self.aliases.get(&normalize_name(a)) {
                if *existing != id {
                    return Err(CatalogError::AliasConflict { alias: a.to_string(), existing: existing.clone() });
                }
            }
        }
        let entry = self.entries.entry(id.clone()).or_insert_with(|| CatalogEntry::new(d));
        for a in aliases {
            if !entry.aliases.iter().any(|x| normalize_name(x) == normalize_name(a)) {
                entry.aliases.push(a.to_string());
            }
            self.aliases.insert(normalize_name(a), id.clone());
        }
        Ok(id)
    }

    /// Insert a whole entry as stored (aliases included).
    pub fn insert_entry(&mut self, e: CatalogEntry) -> Result<(), CatalogError> {
        let aliases: Vec<&str> = e.aliases.iter().map(String::as_str).collect();
        let id = self.insert(&e.diagram, &aliases)?;
        debug_assert_eq!(id, e.id);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.get(id)
    }

    /// Resolve an alias (case-insensitively), an id or unique id prefix of
    /// at least 6 digits, or a diagram name that is in the catalog.
    pub fn resolve(&self, name: &str) -> Result<&CatalogEntry, CatalogError> {
        if let Some(id) = self.aliases.get(&normalize_name(name)) {
            return Ok(&self.entries[id]);
        }
        if let Some(e) = self.entries.get(name) {
            return Ok(e);
        }
        if name.len() >= 6 && name.chars().all(|c| c.is_ascii_hexdigit()) {
            let mut hits = self.entries.range(name.to_string()..).take_while(|(k, _)| k.starts_with(name));
            if let Some((_, e)) = hits.next() {
                return if hits.next().is_some() { Err(CatalogError::Ambiguous(name.into())) } else { Ok(e) };
            }
        }
        if let Ok(d) = named_diagram(name) {
            if let Some(e) = self.entries.get(&diagram_id(&d)) {
                return Ok(e);
            }
        }
        Err(CatalogError::Unknown(name.into()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::triangle;

    #[test]
    fn ids_ignore_vertex_order() {
        let a = triangle(2, 3, 7).unwrap();
        let b = triangle(7, 2, 3).unwrap();
        assert_eq!(diagram_id(&a), diagram_id(&b));
        assert_ne!(diagram_id(&a), diagram_id(&triangle(3, 3, 7).unwrap()));
    }

    #[test]
    fn builtin_resolves_names() {
        let c = Catalog::builtin(4);
        let e = c.resolve("[3^{[3,3]}]").unwrap();
        assert!(e.aliases.iter().any(|a| a.starts_with("r4-")));
        assert_eq!(c.resolve("f3").unwrap().rank(), 7);
        assert_eq!(c.resolve(&e.id[..8]).unwrap().id, e.id);
        assert!(c.resolve("(2,3,8)").is_err());
        let mut c2 = Catalog::new();
        c2.insert(&triangle(2, 3, 7).unwrap(), &["x"]).unwrap();
        assert!(c2.insert(&triangle(3, 3, 7).unwrap(), &["X"]).is_err());
    }
}
