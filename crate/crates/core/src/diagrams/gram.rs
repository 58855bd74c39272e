use crate::scalars::{FieldScalar, Matrix};

use super::CoxeterDiagram;

/// How simple normals are scaled.
#[derive(Clone, Copy, Debug)]
pub enum Normalization<'a> {
    /// Unit normals: G_ii = 1, G_ij = −cos(π/m_ij).
    Unit,
    /// Root normals with the given squared lengths:
    /// B_ii = q_i, B_ij = −√(q_i q_j)·cos(π/m_ij).
    Root(&'a [u32]),
}

pub fn gram_of(d: &CoxeterDiagram, norm: &Normalization) -> Matrix {
    let n = d.rank();
    let mut g = vec![vec![FieldScalar::zero(); n]; n];
    for i in 0..n {
        g[i][i] = match norm {
            Normalization::Unit => FieldScalar::one(),
            Normalization::Root(q) => FieldScalar::from_integer(q[i] as i64),
        };
        for j in i + 1..n {
            let m = d.label(i, j);
            if !m.is_edge() {
                continue;
            }
            let c = m.cos();
            let v = match norm {
                Normalization::Unit => -c,
                Normalization::Root(q) => {
                    let s = FieldScalar::sqrt_of(q[i] as u64 * q[j] as u64)
                        .expect("squared lengths with supported radicands");
                    -(s * c)
                }
            };
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::Label;

    #[test]
    fn unit_and_root_entries() {
        let a2 = CoxeterDiagram::from_label_edges(2, &[(0, 1, 3)]).unwrap();
        let g = gram_of(&a2, &Normalization::Unit);
        assert_eq!(g[0][1], FieldScalar::from_ratio(-1, 2));
        let b2 = CoxeterDiagram::from_edges(2, &[(0, 1, Label::finite(4).unwrap())]).unwrap();
        let g = gram_of(&b2, &Normalization::Root(&[2, 4]));
        assert_eq!(g[0][1], FieldScalar::from_integer(-2));
        let inf = CoxeterDiagram::from_edges(2, &[(0, 1, Label::INF)]).unwrap();
        let g = gram_of(&inf, &Normalization::Root(&[2, 8]));
        assert_eq!(g[0][1], FieldScalar::from_integer(-4));
    }
}
