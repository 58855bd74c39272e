use serde::{Deserialize, Serialize};

use crate::scalars::{inertia, Matrix};

use super::{gram_of, CoxeterDiagram, Label, Normalization};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagramTag {
    Elliptic,
    Parabolic,
    HyperbolicSimplicialCompact,
    HyperbolicSimplicialNoncompact,
    OtherIndefinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagramClass {
    pub tag: DiagramTag,
    /// Inertia (positive, negative, zero) of the unit Gram matrix.
    pub signature: (usize, usize, usize),
}

impl DiagramClass {
    pub fn is_hyperbolic_simplicial(&self) -> bool {
        matches!(
            self.tag,
            DiagramTag::HyperbolicSimplicialCompact | DiagramTag::HyperbolicSimplicialNoncompact
        )
    }

    pub fn is_compact(&self) -> bool {
        self.tag == DiagramTag::HyperbolicSimplicialCompact
    }
}

/// Connected components as sorted vertex lists, ordered by least vertex.
pub fn components(d: &CoxeterDiagram) -> Vec<Vec<usize>> {
    let n = d.rank();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for u in d.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn principal(g: &Matrix, verts: &[usize]) -> Matrix {
    verts.iter().map(|&i| verts.iter().map(|&j| g[i][j].clone()).collect()).collect()
}

/// Exact classification by Sylvester inertia of the unit Gram matrix.
pub fn classify(d: &CoxeterDiagram) -> DiagramClass {
    let n = d.rank();
    let g = gram_of(d, &Normalization::Unit);
    let signature = inertia(&g);
    let (p, q, z) = signature;
    let comps = components(d);
    let tag = if q == 0 && z == 0 {
        DiagramTag::Elliptic
    } else if q == 0 {
        let kernel_ok = comps.iter().all(|c| inertia(&principal(&g, c)).2 <= 1);
        if kernel_ok {
            DiagramTag::Parabolic
        } else {
            DiagramTag::OtherIndefinite
        }
    } else if q == 1 && z == 0 && p + 1 == n && comps.len() == 1 {
        let mut all_elliptic = true;
        let mut finite_volume = true;
        for v in 0..n {
            let verts: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            let (_, sq, sz) = inertia(&principal(&g, &verts));
            if sq > 0 {
                finite_volume = false;
                break;
            }
            if sz > 0 {
                all_elliptic = false;
            }
        }
        match (finite_volume, all_elliptic) {
            (false, _) => DiagramTag::OtherIndefinite,
            (true, true) => DiagramTag::HyperbolicSimplicialCompact,
            (true, false) => DiagramTag::HyperbolicSimplicialNoncompact,
        }
    } else {
        DiagramTag::OtherIndefinite
    };
    DiagramClass { tag, signature }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComponentKind {
    Finite,
    Affine,
}

/// Recognize a connected diagram from the lists of connected finite and
/// affine Coxeter diagrams. Returns the kind and the type name, or `None`
/// if the diagram is neither (i.e. its Gram matrix is indefinite).
pub fn component_type(d: &CoxeterDiagram) -> Option<(ComponentKind, String)> {
    use ComponentKind::*;
    let n = d.rank();
    if n == 1 {
        return Some((Finite, "A1".into()));
    }
    let edges = d.edges();
    let three = Label::finite(3).unwrap();
    let four = Label::finite(4).unwrap();
    let five = Label::finite(5).unwrap();
    let six = Label::finite(6).unwrap();
    if edges.iter().any(|e| e.2.is_infinite()) {
        return if n == 2 { Some((Affine, "~A1".into())) } else { None };
    }
    if n == 2 {
        let m = edges[0].2.order().unwrap();
        let name = match m {
            3 => "A2".to_string(),
            4 => "B2".to_string(),
            6 => "G2".to_string(),
            m => format!("I2({m})"),
        };
        return Some((Finite, name));
    }
    if edges.iter().any(|e| e.2.order().unwrap() >= 7) {
        return None;
    }
    let deg: Vec<usize> = (0..n).map(|v| d.degree(v)).collect();
    if edges.len() == n {
        let cycle = deg.iter().all(|&k| k == 2);
        let simple = edges.iter().all(|e| e.2 == three);
        return if cycle && simple { Some((Affine, format!("~A{}", n - 1))) } else { None };
    }
    if edges.len() != n - 1 {
        return None;
    }
    // tree
    let count = |l: Label| edges.iter().filter(|e| e.2 == l).count();
    let (n4, n5, n6) = (count(four), count(five), count(six));
    let maxdeg = *deg.iter().max().unwrap();
    if n6 > 0 {
        // only ~G2: path 3, 6 on three vertices
        return if n == 3 && n6 == 1 && count(three) == 1 { Some((Affine, "~G2".into())) } else { None };
    }
    if maxdeg >= 5 {
        return None;
    }
    if maxdeg == 4 {
        return if n == 5 && count(three) == 4 { Some((Affine, "~D4".into())) } else { None };
    }
    let branch: Vec<usize> = (0..n).filter(|&v| deg[v] == 3).collect();
    if branch.is_empty() {
        let path = path_order(d);
        let labels: Vec<Label> = path.windows(2).map(|w| d.label(w[0], w[1])).collect();
        let k = labels.len();
        if n5 > 0 {
            let end5 = n5 == 1 && (labels[0] == five || labels[k - 1] == five);
            return match (end5, n) {
                (true, 3) if n4 == 0 => Some((Finite, "H3".into())),
                (true, 4) if n4 == 0 => Some((Finite, "H4".into())),
                _ => None,
            };
        }
        return match n4 {
            0 => Some((Finite, format!("A{n}"))),
            1 => {
                if labels[0] == four || labels[k - 1] == four {
                    Some((Finite, format!("B{n}")))
                } else if n == 4 && labels[1] == four {
                    Some((Finite, "F4".into()))
                } else if n == 5 && (labels[1] == four || labels[2] == four) {
                    Some((Affine, "~F4".into()))
                } else {
                    None
                }
            }
            2 if labels[0] == four && labels[k - 1] == four => Some((Affine, format!("~C{}", n - 1))),
            _ => None,
        };
    }
    if n5 > 0 {
        return None;
    }
    if branch.len() == 1 {
        let c = branch[0];
        let mut arms: Vec<(usize, Vec<Label>)> = d
            .neighbors(c)
            .map(|start| {
                let labels = arm_labels(d, c, start);
                (labels.len(), labels)
            })
            .collect();
        arms.sort_by_key(|a| a.0);
        let lens: Vec<usize> = arms.iter().map(|a| a.0).collect();
        if n4 > 0 {
            // ~B: arms (1, 1, L) with the 4-edge as the last edge of the long arm
            let ok = n4 == 1
                && lens[0] == 1
                && lens[1] == 1
                && (lens[2] == 1 || arms[2].1.last() == Some(&four));
            return if ok { Some((Affine, format!("~B{}", n - 1))) } else { None };
        }
        return match lens.as_slice() {
            [1, 1, k] => Some((Finite, format!("D{}", k + 3))),
            [1, 2, 2] => Some((Finite, "E6".into())),
            [1, 2, 3] => Some((Finite, "E7".into())),
            [1, 2, 4] => Some((Finite, "E8".into())),
            [2, 2, 2] => Some((Affine, "~E6".into())),
            [1, 3, 3] => Some((Affine, "~E7".into())),
            [1, 2, 5] => Some((Affine, "~E8".into())),
            _ => None,
        };
    }
    if branch.len() == 2 && n4 == 0 {
        let leaves_ok = branch
            .iter()
            .all(|&b| d.neighbors(b).filter(|&u| deg[u] == 1).count() == 2);
        return if leaves_ok { Some((Affine, format!("~D{}", n - 1))) } else { None };
    }
    None
}

/// Vertices of a path diagram in order from one end.
fn path_order(d: &CoxeterDiagram) -> Vec<usize> {
    let n = d.rank();
    let start = (0..n).find(|&v| d.degree(v) <= 1).unwrap_or(0);
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while let Some(next) = d.neighbors(cur).find(|&u| u != prev) {
        prev = cur;
        cur = next;
        order.push(cur);
    }
    order
}

/// Edge labels along the arm leaving `center` through `start`, outwards.
fn arm_labels(d: &CoxeterDiagram, center: usize, start: usize) -> Vec<Label> {
    let mut labels = vec![d.label(center, start)];
    let (mut prev, mut cur) = (center, start);
    while let Some(next) = d.neighbors(cur).find(|&u| u != prev) {
        labels.push(d.label(cur, next));
        prev = cur;
        cur = next;
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::triangle;

    #[test]
    fn small_examples() {
        let a2 = CoxeterDiagram::from_label_edges(2, &[(0, 1, 3)]).unwrap();
        assert_eq!(classify(&a2).tag, DiagramTag::Elliptic);
        let t = triangle(2, 3, 7).unwrap();
        assert_eq!(classify(&t).tag, DiagramTag::HyperbolicSimplicialCompact);
        let a2t = CoxeterDiagram::from_label_edges(3, &[(0, 1, 3), (1, 2, 3), (0, 2, 3)]).unwrap();
        assert_eq!(classify(&a2t).tag, DiagramTag::Parabolic);
        let ideal = triangle(0, 0, 0).unwrap();
        let c = classify(&ideal);
        assert_eq!(c.tag, DiagramTag::HyperbolicSimplicialNoncompact);
        assert_eq!(c.signature, (2, 1, 0));
    }

    #[test]
    fn recognizer_names() {
        let star = CoxeterDiagram::from_label_edges(5, &[(0, 1, 3), (0, 2, 3), (0, 3, 3), (0, 4, 3)]).unwrap();
        assert_eq!(component_type(&star), Some((ComponentKind::Affine, "~D4".into())));
        let b3t = CoxeterDiagram::from_label_edges(4, &[(0, 1, 3), (0, 2, 3), (0, 3, 4)]).unwrap();
        assert_eq!(component_type(&b3t), Some((ComponentKind::Affine, "~B3".into())));
        let f4 = CoxeterDiagram::from_label_edges(4, &[(0, 1, 3), (1, 2, 4), (2, 3, 3)]).unwrap();
        assert_eq!(component_type(&f4), Some((ComponentKind::Finite, "F4".into())));
        let h4 = CoxeterDiagram::from_label_edges(4, &[(0, 1, 5), (1, 2, 3), (2, 3, 3)]).unwrap();
        assert_eq!(component_type(&h4), Some((ComponentKind::Finite, "H4".into())));
        let bad = CoxeterDiagram::from_label_edges(4, &[(0, 1, 3), (1, 2, 5), (2, 3, 3)]).unwrap();
        assert_eq!(component_type(&bad), None);
    }
}
