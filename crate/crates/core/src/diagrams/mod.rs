//! Coxeter and Dynkin diagrams: representation, Gram matrices,
//! classification, canonical forms, enumeration and surgery.

mod canon;
mod classify;
mod crystal;
mod enumerate;
mod gram;
mod names;
mod prefilter;
mod text;
mod visual;

pub use canon::{automorphisms, canonical_form, CanonicalForm};
pub use classify::{classify, component_type, components, ComponentKind, DiagramClass, DiagramTag};
pub use crystal::crystallographic_variants;
pub use enumerate::{enumerate_simplicial, EnumerateError, LabelSet};
pub use gram::{gram_of, Normalization};
pub use names::{named_diagram, normalize_name, pyramid, triangle, NAMED_DIAGRAMS};
pub use prefilter::{induced_embeddings, subdiagram_prefilter, PrefilterResult};
pub use text::{format_diagram, parse_diagram_text, ParsedDiagram};
pub use visual::{surgery_rule_label, visual_subgroup, EdgeMark, VisualSubgroup, VisualVertex};
pub(crate) use visual::mark_from_product;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalars::FieldScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("rank must be at least 1, got {0}")]
    BadRank(usize),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("unsupported edge label {0}")]
    BadLabel(String),
    #[error("invalid squared lengths: {0}")]
    BadLengths(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown diagram name {0:?}")]
    UnknownName(String),
}

/// Edge label m_ij: the dihedral angle is π/m, ∞ meaning parallel mirrors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(u8);

impl Label {
    /// Label 2: orthogonal mirrors, drawn as no edge.
    pub const TWO: Label = Label(2);
    pub const INF: Label = Label(u8::MAX);

    /// Finite label m ≥ 2. Only m ≤ 7 have exact cosines in the field.
    pub fn finite(m: u32) -> Result<Label, DiagramError> {
        if (2..=7).contains(&m) {
            Ok(Label(m as u8))
        } else {
            Err(DiagramError::BadLabel(m.to_string()))
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Label::INF
    }

    /// True for an actual edge of the diagram (m ≠ 2).
    pub fn is_edge(self) -> bool {
        self != Label::TWO
    }

    pub fn order(self) -> Option<u32> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0 as u32)
        }
    }

    /// cos(π/m), with 1 for ∞.
    pub fn cos(self) -> FieldScalar {
        match self.order() {
            None => FieldScalar::one(),
            Some(m) => FieldScalar::cos_pi_over(m).expect("label within supported range"),
        }
    }

    /// cos²(π/m) as an exact field element.
    pub fn cos_squared(self) -> FieldScalar {
        self.cos().square()
    }

    /// Sort code with ∞ largest.
    pub fn code(self) -> u8 {
        self.0
    }

    /// Label whose cosine equals the given non-negative value, if any.
    pub fn from_cos(c: &FieldScalar) -> Option<Label> {
        if c.is_one() {
            return Some(Label::INF);
        }
        (2..=7).map(|m| Label(m as u8)).find(|l| &l.cos() == c)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            None => write!(f, "inf"),
            Some(m) => write!(f, "{m}"),
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Label {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "∞" | "0" => Ok(Label::INF),
            t => {
                let m: u32 = t.parse().map_err(|_| DiagramError::BadLabel(t.to_string()))?;
                Label::finite(m)
            }
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.order() {
            Some(m) => s.serialize_u32(m),
            None => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(m) => Label::finite(m).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Edge-labelled complete graph; pairs with label 2 are "no edge".
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoxeterDiagram {
    rank: usize,
    labels: Vec<Label>,
}

impl CoxeterDiagram {
    /// Diagram with all labels 2.
    pub fn empty(rank: usize) -> Self {
        CoxeterDiagram { rank, labels: vec![Label::TWO; rank * rank] }
    }

    pub fn from_edges(rank: usize, edges: &[(usize, usize, Label)]) -> Result<Self, DiagramError> {
        if rank == 0 {
            return Err(DiagramError::BadRank(rank));
        }
        let mut d = Self::empty(rank);
        for &(i, j, m) in edges {
            if i >= rank || j >= rank {
                return Err(DiagramError::BadVertex(i.max(j)));
            }
            if i == j {
                return Err(DiagramError::BadVertex(i));
            }
            d.set(i, j, m);
        }
        Ok(d)
    }

    /// Convenience constructor from 0-based edges with numeric labels,
    /// 0 meaning ∞.
    pub fn from_label_edges(rank: usize, edges: &[(usize, usize, u32)]) -> Result<Self, DiagramError> {
        let mut e = Vec::with_capacity(edges.len());
        for &(i, j, m) in edges {
            let l = if m == 0 { Label::INF } else { Label::finite(m)? };
            e.push((i, j, l));
        }
        Self::from_edges(rank, &e)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.labels[i * self.rank + j]
    }

    pub fn set(&mut self, i: usize, j: usize, m: Label) {
        self.labels[i * self.rank + j] = m;
        self.labels[j * self.rank + i] = m;
    }

    /// All edges (i < j, label ≠ 2).
    pub fn edges(&self) -> Vec<(usize, usize, Label)> {
        let mut out = Vec::new();
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                let m = self.label(i, j);
                if m.is_edge() {
                    out.push((i, j, m));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank).filter(move |&u| u != v && self.label(v, u).is_edge())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// Full subdiagram on the given vertices, in the given order.
    pub fn subdiagram(&self, verts: &[usize]) -> CoxeterDiagram {
        let k = verts.len();
        let mut d = Self::empty(k);
        for a in 0..k {
            for b in a + 1..k {
                d.set(a, b, self.label(verts[a], verts[b]));
            }
        }
        d
    }

    /// Subdiagram with one vertex removed.
    pub fn without(&self, v: usize) -> CoxeterDiagram {
        let verts: Vec<usize> = (0..self.rank).filter(|&u| u != v).collect();
        self.subdiagram(&verts)
    }

    /// Relabel vertices: new vertex a is old vertex perm[a].
    pub fn permuted(&self, perm: &[usize]) -> CoxeterDiagram {
        self.subdiagram(perm)
    }

    pub fn is_connected(&self) -> bool {
        classify::components(self).len() <= 1
    }

    pub fn has_label(&self, m: Label) -> bool {
        self.edges().iter().any(|e| e.2 == m)
    }

    /// Simply laced: every edge label is 3.
    pub fn is_simply_laced(&self) -> bool {
        self.edges().iter().all(|e| e.2 == Label::finite(3).unwrap())
    }
}

impl fmt::Debug for CoxeterDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoxeterDiagram(rank {}; ", self.rank)?;
        let parts: Vec<String> =
            self.edges().iter().map(|(i, j, m)| format!("{}-{}:{}", i, j, m)).collect();
        write!(f, "{})", parts.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramRepr {
    rank: usize,
    edges: Vec<(usize, usize, Label)>,
}

impl Serialize for CoxeterDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DiagramRepr { rank: self.rank, edges: self.edges() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CoxeterDiagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DiagramRepr::deserialize(d)?;
        CoxeterDiagram::from_edges(r.rank, &r.edges).map_err(serde::de::Error::custom)
    }
}

/// A Coxeter diagram with squared root lengths (a hyperbolic root system
/// when the diagram is hyperbolic).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DynkinDiagram {
    pub base: CoxeterDiagram,
    pub norms: Vec<u32>,
}

impl DynkinDiagram {
    /// Validates the edge-length constraints and integrality of the
    /// symmetrized Gram matrix.
    pub fn new(base: CoxeterDiagram, norms: Vec<u32>) -> Result<Self, DiagramError> {
        if norms.len() != base.rank() {
            return Err(DiagramError::BadLengths(format!(
                "expected {} lengths, got {}",
                base.rank(),
                norms.len()
            )));
        }
        if norms.contains(&0) {
            return Err(DiagramError::BadLengths("zero squared length".into()));
        }
        for (i, j, m) in base.edges() {
            let (a, b) = (norms[i].min(norms[j]), norms[i].max(norms[j]));
            let ok = match m.order() {
                Some(3) => a == b,
                Some(4) => b == 2 * a,
                Some(6) => b == 3 * a,
                None => a == b || b == 4 * a,
                _ => false,
            };
            if !ok {
                return Err(DiagramError::BadLengths(format!(
                    "edge {}-{} with label {} cannot join lengths {} and {}",
                    i + 1,
                    j + 1,
                    m,
                    norms[i],
                    norms[j]
                )));
            }
        }
        let d = DynkinDiagram { base, norms };
        let g = gram_of(&d.base, &Normalization::Root(&d.norms));
        if g.iter().flatten().any(|x| !x.is_integer()) {
            return Err(DiagramError::BadLengths("symmetrized Gram matrix is not integral".into()));
        }
        Ok(d)
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    /// Integer symmetrized Gram matrix B.
    pub fn gram_integers(&self) -> Vec<Vec<num_bigint::BigInt>> {
        gram_of(&self.base, &Normalization::Root(&self.norms))
            .into_iter()
            .map(|row| row.into_iter().map(|x| x.to_integer().expect("integral Gram")).collect())
            .collect()
    }

    /// Generalized Cartan matrix A_ij = 2 B_ij / B_ii.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let b = self.gram_integers();
        let n = self.rank();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v: num_bigint::BigInt = &b[i][j] * 2 / &b[i][i];
                        num_traits::ToPrimitive::to_i64(&v).expect("small Cartan entry")
                    })
                    .collect()
            })
            .collect()
    }

    /// Number of distinct root lengths.
    pub fn length_count(&self) -> usize {
        let mut v = self.norms.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}
