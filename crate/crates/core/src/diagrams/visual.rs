//! Visual subgroups: replace two generators r_i, r_j joined by an edge by
//! the conjugate r_i r_j r_i, whose mirror has unit normal v* = r_i(v_j).

use serde::{Deserialize, Serialize};

use crate::scalars::{bilinear, FieldScalar, Matrix, Sign};

use super::{gram_of, CoxeterDiagram, Label, Normalization};

/// Relation between two generators of a visual subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeMark {
    Label(Label),
    /// Divergent mirrors (normalized product < −1).
    Dotted,
    /// Intersecting at an angle that is not π/m (never arises for labels ≤ 7
    /// but reported rather than rounded).
    Irregular,
}

/// Vertex of the surgered diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VisualVertex {
    Star,
    Original(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VisualSubgroup {
    pub shrink: (usize, usize),
    pub vertices: Vec<VisualVertex>,
    /// Pairwise marks, indexed like `vertices`.
    pub marks: Vec<Vec<Option<EdgeMark>>>,
    /// Unit normals of the generators in the ambient simple-normal basis.
    pub generators: Vec<Vec<FieldScalar>>,
    /// Exact Gram matrix of the generators.
    pub gram: Matrix,
    /// Diagram on the non-dotted part (dotted pairs are set to label 2 and
    /// listed in `dotted`).
    pub diagram: CoxeterDiagram,
    pub dotted: Vec<(usize, usize)>,
}

impl VisualSubgroup {
    /// No dotted or irregular pair: the generators have a Coxeter diagram.
    pub fn is_simplex_candidate(&self) -> bool {
        self.marks
            .iter()
            .flatten()
            .all(|m| !matches!(m, Some(EdgeMark::Dotted) | Some(EdgeMark::Irregular)))
    }
}

/// Mark for a normalized inner product ⟨a, b⟩ of unit normals.
pub(crate) fn mark_from_product(p: &FieldScalar) -> EdgeMark {
    let c = -p;
    match c.sign() {
        Sign::Negative => EdgeMark::Irregular,
        Sign::Zero => EdgeMark::Label(Label::TWO),
        Sign::Positive => match (&c - &FieldScalar::one()).sign() {
            Sign::Positive => EdgeMark::Dotted,
            Sign::Zero => EdgeMark::Label(Label::INF),
            Sign::Negative => Label::from_cos(&c).map(EdgeMark::Label).unwrap_or(EdgeMark::Irregular),
        },
    }
}

/// The diagram-surgery rule for shrinking a simple edge (i, j): the mark
/// between v* and v_k.
pub fn surgery_rule_label(d: &CoxeterDiagram, i: usize, j: usize, k: usize) -> EdgeMark {
    let three = Label::finite(3).unwrap();
    let (a, b) = (d.label(k, i), d.label(k, j));
    match (a.is_edge(), b.is_edge()) {
        (true, true) if a == three && b == three => EdgeMark::Label(Label::INF),
        (true, true) => EdgeMark::Dotted,
        (true, false) => EdgeMark::Label(a),
        (false, true) => EdgeMark::Label(b),
        (false, false) => EdgeMark::Label(Label::TWO),
    }
}

/// Shrink edge (i, j) into v* and keep the listed vertices (all remaining
/// vertices plus v* when `keep` is `None`).
pub fn visual_subgroup(
    d: &CoxeterDiagram,
    shrink: (usize, usize),
    keep: Option<&[VisualVertex]>,
) -> Option<VisualSubgroup> {
    let (i, j) = shrink;
    let n = d.rank();
    if i >= n || j >= n || i == j || !d.label(i, j).is_edge() {
        return None;
    }
    let g = gram_of(d, &Normalization::Unit);
    let unit = |k: usize| -> Vec<FieldScalar> {
        (0..n).map(|t| if t == k { FieldScalar::one() } else { FieldScalar::zero() }).collect()
    };
    // v* = v_j − 2⟨v_j, v_i⟩ v_i
    let two_c = &g[i][j] * FieldScalar::from_integer(-2);
    let mut star = unit(j);
    star[i] = two_c;
    let vertices: Vec<VisualVertex> = match keep {
        Some(k) => k.to_vec(),
        None => std::iter::once(VisualVertex::Star)
            .chain((0..n).filter(|&k| k != i && k != j).map(VisualVertex::Original))
            .collect(),
    };
    if vertices.iter().any(|v| matches!(v, VisualVertex::Original(k) if *k == i || *k == j || *k >= n)) {
        return None;
    }
    let generators: Vec<Vec<FieldScalar>> = vertices
        .iter()
        .map(|v| match v {
            VisualVertex::Star => star.clone(),
            VisualVertex::Original(k) => unit(*k),
        })
        .collect();
    let m = generators.len();
    let gram: Matrix = (0..m)
        .map(|a| (0..m).map(|b| bilinear(&g, &generators[a], &generators[b])).collect())
        .collect();
    let mut marks = vec![vec![None; m]; m];
    let mut diagram = CoxeterDiagram::empty(m);
    let mut dotted = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let mk = mark_from_product(&gram[a][b]);
            marks[a][b] = Some(mk);
            marks[b][a] = Some(mk);
            match mk {
                EdgeMark::Label(l) => diagram.set(a, b, l),
                _ => dotted.push((a, b)),
            }
        }
    }
    Some(VisualSubgroup { shrink, vertices, marks, generators, gram, diagram, dotted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_triangles() {
        let chain = CoxeterDiagram::from_label_edges(3, &[(0, 1, 3), (1, 2, 3)]).unwrap();
        let v = visual_subgroup(&chain, (0, 1), None).unwrap();
        assert_eq!(v.marks[0][1], Some(EdgeMark::Label(Label::finite(3).unwrap())));
        let tri = CoxeterDiagram::from_label_edges(3, &[(0, 1, 3), (1, 2, 3), (0, 2, 3)]).unwrap();
        let v = visual_subgroup(&tri, (0, 1), None).unwrap();
        assert_eq!(v.marks[0][1], Some(EdgeMark::Label(Label::INF)));
        let tri4 = CoxeterDiagram::from_label_edges(3, &[(0, 1, 3), (0, 2, 3), (1, 2, 4)]).unwrap();
        let v = visual_subgroup(&tri4, (0, 1), None).unwrap();
        assert_eq!(v.marks[0][1], Some(EdgeMark::Dotted));
        assert!(!v.is_simplex_candidate());
    }
}
