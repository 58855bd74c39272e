//! Enumeration of hyperbolic simplex diagrams.
//!
//! Every such diagram of rank r has a vertex whose removal leaves a
//! connected diagram of finite or affine type, so candidates are grown
//! from those by adding one vertex. Partial attachments are pruned with
//! the combinatorial finite/affine recognizer; survivors are classified
//! exactly.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use super::{canonical_form, classify, component_type, components, CoxeterDiagram, Label};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("rank 3 requires an explicit finite label set")]
    UnrestrictedRankThree,
    #[error("rank must be at least 3, got {0}")]
    RankTooSmall(usize),
}

/// Edge labels allowed in enumeration (label 2, meaning no edge, is
/// always allowed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelSet {
    /// Every label. For rank ≥ 4 only 3, 4, 5, 6 can occur in a
    /// hyperbolic simplex, so this is exhaustive there.
    Unrestricted,
    Restricted(Vec<Label>),
}

impl LabelSet {
    /// {3, 4, 5, 6, ∞}.
    pub fn standard() -> Self {
        LabelSet::Restricted(standard_labels())
    }

    fn labels(&self) -> Vec<Label> {
        match self {
            LabelSet::Unrestricted => standard_labels(),
            LabelSet::Restricted(v) => v.iter().copied().filter(|l| l.is_edge()).collect(),
        }
    }
}

fn standard_labels() -> Vec<Label> {
    let mut v: Vec<Label> = [3, 4, 5, 6].iter().map(|&m| Label::finite(m).unwrap()).collect();
    v.push(Label::INF);
    v
}

/// Every component finite or affine.
fn is_psd(d: &CoxeterDiagram) -> bool {
    components(d)
        .iter()
        .all(|c| c.len() == 1 || component_type(&d.subdiagram(c)).is_some())
}

/// Connected finite or affine diagrams of each rank up to `max_rank`,
/// deduplicated.
fn connected_psd(max_rank: usize, labels: &[Label]) -> Vec<Vec<CoxeterDiagram>> {
    let mut levels: Vec<Vec<CoxeterDiagram>> = vec![Vec::new(), vec![CoxeterDiagram::empty(1)]];
    for r in 2..=max_rank {
        let mut found: BTreeMap<Vec<u32>, CoxeterDiagram> = BTreeMap::new();
        for base in &levels[r - 1] {
            let k = base.rank();
            let mut choice = vec![Label::TWO; k];
            extend_pruned(base, &mut choice, 0, labels, &mut |ch: &[Label]| {
                if ch.iter().all(|l| !l.is_edge()) {
                    return;
                }
                let d = attach(base, ch);
                if component_type(&d).is_some() {
                    let cf = canonical_form(&d, None);
                    found.entry(cf.code.clone()).or_insert_with(|| cf.diagram(&d));
                }
            });
        }
        levels.push(found.into_values().collect());
    }
    levels
}

/// All attachments of a new vertex whose prefixes stay finite or affine.
fn extend_pruned(
    base: &CoxeterDiagram,
    choice: &mut Vec<Label>,
    pos: usize,
    labels: &[Label],
    f: &mut dyn FnMut(&[Label]),
) {
    if pos > 0 && pos < choice.len() {
        let verts: Vec<usize> = (0..pos).collect();
        if !is_psd(&attach(&base.subdiagram(&verts), &choice[..pos])) {
            return;
        }
    }
    if pos == choice.len() {
        f(choice);
        return;
    }
    for l in std::iter::once(Label::TWO).chain(labels.iter().copied()) {
        choice[pos] = l;
        extend_pruned(base, choice, pos + 1, labels, f);
    }
    choice[pos] = Label::TWO;
}

/// Base diagram plus a new last vertex with the given labels.
fn attach(base: &CoxeterDiagram, labels: &[Label]) -> CoxeterDiagram {
    let k = base.rank();
    let mut d = CoxeterDiagram::empty(k + 1);
    for (i, j, m) in base.edges() {
        d.set(i, j, m);
    }
    for (i, &m) in labels.iter().enumerate() {
        d.set(i, k, m);
    }
    d
}

fn grow_from(base: &CoxeterDiagram, labels: &[Label]) -> Vec<(Vec<u32>, CoxeterDiagram)> {
    let k = base.rank();
    let mut out = Vec::new();
    let mut choice = vec![Label::TWO; k];
    dfs(base, labels, &mut choice, 0, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

fn dfs(
    base: &CoxeterDiagram,
    labels: &[Label],
    choice: &mut Vec<Label>,
    pos: usize,
    out: &mut Vec<(Vec<u32>, CoxeterDiagram)>,
) {
    let k = base.rank();
    if pos > 0 && pos < k {
        // the new vertex with base vertices 0..pos is a proper subdiagram
        let verts: Vec<usize> = (0..pos).collect();
        let prefix = attach(&base.subdiagram(&verts), &choice[..pos]);
        if !is_psd(&prefix) {
            return;
        }
    }
    if pos == k {
        if choice.iter().all(|l| !l.is_edge()) {
            return;
        }
        let d = attach(base, choice);
        // every maximal proper subdiagram must be finite or affine
        if !(0..k).all(|x| is_psd(&d.without(x))) {
            return;
        }
        if classify(&d).is_hyperbolic_simplicial() {
            let cf = canonical_form(&d, None);
            let canon = cf.diagram(&d);
            out.push((cf.code, canon));
        }
        return;
    }
    for l in std::iter::once(Label::TWO).chain(labels.iter().copied()) {
        choice[pos] = l;
        dfs(base, labels, choice, pos + 1, out);
    }
    choice[pos] = Label::TWO;
}

/// All hyperbolic simplex diagrams of the given rank with labels in the
/// set, up to isomorphism, in canonical order and canonical vertex order.
pub fn enumerate_simplicial(rank: usize, labels: &LabelSet) -> Result<Vec<CoxeterDiagram>, EnumerateError> {
    if rank < 3 {
        return Err(EnumerateError::RankTooSmall(rank));
    }
    if rank == 3 && *labels == LabelSet::Unrestricted {
        return Err(EnumerateError::UnrestrictedRankThree);
    }
    let labs = labels.labels();
    let bases = connected_psd(rank - 1, &labs);
    let found: Vec<Vec<(Vec<u32>, CoxeterDiagram)>> =
        bases[rank - 1].par_iter().map(|b| grow_from(b, &labs)).collect();
    let mut seen = BTreeSet::new();
    let mut all: Vec<(Vec<u32>, CoxeterDiagram)> = Vec::new();
    for (code, d) in found.into_iter().flatten() {
        if seen.insert(code.clone()) {
            all.push((code, d));
        }
    }
    all.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(all.into_iter().map(|x| x.1).collect())
}
