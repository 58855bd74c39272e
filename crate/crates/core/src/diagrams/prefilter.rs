//! Necessary conditions for H to be a finite-index reflection subgroup
//! of G in terms of diagrams alone.

use serde::{Deserialize, Serialize};

use super::{classify, CoxeterDiagram};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum PrefilterResult {
    Pass,
    /// A vertex link of H that does not occur in G.
    MissingSubdiagram { vertex: usize },
    /// H has an ideal vertex while G is compact.
    IdealInCompact { vertex: usize },
    /// Rank mismatch or a diagram that is not a hyperbolic simplex.
    NotComparable { reason: String },
}

impl PrefilterResult {
    pub fn passed(&self) -> bool {
        matches!(self, PrefilterResult::Pass)
    }
}

/// Injections f of the vertices of `small` into those of `big` with
/// m(f(a), f(b)) = m(a, b) for all pairs.
pub fn induced_embeddings(small: &CoxeterDiagram, big: &CoxeterDiagram) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; big.rank()];
    fn go(
        small: &CoxeterDiagram,
        big: &CoxeterDiagram,
        cur: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let a = cur.len();
        if a == small.rank() {
            out.push(cur.clone());
            return;
        }
        for v in 0..big.rank() {
            if used[v] || (0..a).any(|b| big.label(cur[b], v) != small.label(b, a)) {
                continue;
            }
            used[v] = true;
            cur.push(v);
            go(small, big, cur, used, out);
            cur.pop();
            used[v] = false;
        }
    }
    go(small, big, &mut cur, &mut used, &mut out);
    out
}

fn has_embedding(small: &CoxeterDiagram, big: &CoxeterDiagram) -> bool {
    // the first hit is enough; the search is tiny for rank ≤ 10
    !induced_embeddings(small, big).is_empty()
}

/// A finite-index subgroup H of G has, at each ordinary vertex, a finite
/// vertex stabilizer that is a finite-index subgroup of a vertex stabilizer
/// of G; for simplices this forces the link diagrams of H's ordinary
/// vertices to be induced subdiagrams of G.
pub fn subdiagram_prefilter(g: &CoxeterDiagram, h: &CoxeterDiagram) -> PrefilterResult {
    if g.rank() != h.rank() {
        return PrefilterResult::NotComparable { reason: format!("ranks {} and {}", g.rank(), h.rank()) };
    }
    let (cg, ch) = (classify(g), classify(h));
    if !cg.is_hyperbolic_simplicial() || !ch.is_hyperbolic_simplicial() {
        return PrefilterResult::NotComparable { reason: "not a hyperbolic simplex".into() };
    }
    for j in 0..h.rank() {
        let link = h.without(j);
        let s = classify(&link).signature;
        let finite = s.1 == 0 && s.2 == 0;
        if !finite {
            if cg.is_compact() {
                return PrefilterResult::IdealInCompact { vertex: j };
            }
            continue;
        }
        if !has_embedding(&link, g) {
            return PrefilterResult::MissingSubdiagram { vertex: j };
        }
    }
    PrefilterResult::Pass
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::named_diagram;

    #[test]
    fn embeddings_of_a_path() {
        let p = CoxeterDiagram::from_label_edges(2, &[(0, 1, 3)]).unwrap();
        let k4 = named_diagram("[3^{[3,3]}]").unwrap();
        assert_eq!(induced_embeddings(&p, &k4).len(), 12);
    }

    #[test]
    fn identity_passes() {
        let g = named_diagram("[3,5,3]").unwrap();
        assert!(subdiagram_prefilter(&g, &g).passed());
        let h = named_diagram("[5,3,5]").unwrap();
        assert!(!subdiagram_prefilter(&g, &h).passed());
    }
}
