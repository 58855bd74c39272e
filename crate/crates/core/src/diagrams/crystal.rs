use std::collections::BTreeMap;

use num_integer::Integer;

use super::{canonical_form, components, CoxeterDiagram, DynkinDiagram};

/// Possible (log₂, log₃) ratios q_j / q_i across an edge.
fn edge_steps(order: Option<u32>) -> Option<Vec<(i32, i32)>> {
    match order {
        Some(3) => Some(vec![(0, 0)]),
        Some(4) => Some(vec![(1, 0), (-1, 0)]),
        Some(6) => Some(vec![(0, 1), (0, -1)]),
        None => Some(vec![(0, 0), (2, 0), (-2, 0)]),
        _ => None,
    }
}

/// Exponent assignments for one connected component, normalized so the
/// first vertex has exponent (0, 0).
fn component_assignments(d: &CoxeterDiagram, comp: &[usize]) -> Option<Vec<BTreeMap<usize, (i32, i32)>>> {
    for (i, j, m) in d.edges() {
        if comp.contains(&i) && comp.contains(&j) {
            edge_steps(m.order())?;
        }
    }
    // spanning-tree order
    let mut order = vec![(comp[0], usize::MAX)];
    let mut seen = vec![comp[0]];
    let mut k = 0;
    while k < order.len() {
        let v = order[k].0;
        k += 1;
        for u in d.neighbors(v) {
            if !seen.contains(&u) {
                seen.push(u);
                order.push((u, v));
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = BTreeMap::new();
    cur.insert(comp[0], (0, 0));
    fn go(
        d: &CoxeterDiagram,
        order: &[(usize, usize)],
        idx: usize,
        cur: &mut BTreeMap<usize, (i32, i32)>,
        out: &mut Vec<BTreeMap<usize, (i32, i32)>>,
    ) {
        if idx == order.len() {
            let consistent = d.edges().iter().all(|&(i, j, m)| match (cur.get(&i), cur.get(&j)) {
                (Some(a), Some(b)) => edge_steps(m.order())
                    .unwrap()
                    .contains(&(b.0 - a.0, b.1 - a.1)),
                _ => true,
            });
            if consistent {
                out.push(cur.clone());
            }
            return;
        }
        let (v, parent) = order[idx];
        let p = cur[&parent];
        for s in edge_steps(d.label(parent, v).order()).unwrap() {
            cur.insert(v, (p.0 + s.0, p.1 + s.1));
            go(d, order, idx + 1, cur, out);
        }
        cur.remove(&v);
    }
    go(d, &order, 1, &mut cur, &mut out);
    Some(out)
}

/// Squared lengths from exponents: smallest scaled to 2, then scaled up
/// until the symmetrized Gram matrix is integral.
fn norms_from_exponents(exps: &[(i32, i32)]) -> Option<Vec<u32>> {
    let min2 = exps.iter().map(|e| e.0).min()?;
    let min3 = exps.iter().map(|e| e.1).min()?;
    let raw: Vec<u64> = exps
        .iter()
        .map(|e| 2u64.pow((e.0 - min2) as u32) * 3u64.pow((e.1 - min3) as u32))
        .collect();
    let g = raw.iter().fold(0u64, |acc, &x| acc.gcd(&x));
    let m = raw.iter().min()? / g;
    let norms: Vec<u64> = if raw.iter().all(|x| (2 * x / g) % m == 0) {
        raw.iter().map(|x| 2 * x / g / m).collect()
    } else {
        raw.iter().map(|x| 2 * x / g).collect()
    };
    norms.iter().map(|&q| u32::try_from(q).ok()).collect()
}

/// All consistent squared-length assignments, up to global rescaling of
/// each component and diagram automorphisms. Empty iff the diagram is not
/// crystallographic.
pub fn crystallographic_variants(d: &CoxeterDiagram) -> Vec<DynkinDiagram> {
    let n = d.rank();
    let comps = components(d);
    let mut per_comp: Vec<Vec<BTreeMap<usize, (i32, i32)>>> = Vec::new();
    for c in &comps {
        match component_assignments(d, c) {
            Some(v) if !v.is_empty() => per_comp.push(v),
            _ => return Vec::new(),
        }
    }
    let mut results: BTreeMap<Vec<u32>, DynkinDiagram> = BTreeMap::new();
    let mut idx = vec![0usize; comps.len()];
    loop {
        let mut norms = vec![0u32; n];
        let mut ok = true;
        for (ci, c) in comps.iter().enumerate() {
            let a = &per_comp[ci][idx[ci]];
            let exps: Vec<(i32, i32)> = c.iter().map(|v| a[v]).collect();
            match norms_from_exponents(&exps) {
                Some(q) => {
                    for (k, &v) in c.iter().enumerate() {
                        norms[v] = q[k];
                    }
                }
                None => ok = false,
            }
        }
        if ok {
            let variant = DynkinDiagram::new(d.clone(), norms.clone()).or_else(|_| {
                DynkinDiagram::new(d.clone(), norms.iter().map(|q| q * 2).collect())
            });
            if let Ok(v) = variant {
                let code = canonical_form(d, Some(&v.norms)).code;
                results.entry(code).or_insert(v);
            }
        }
        // next tuple
        let mut k = 0;
        loop {
            if k == comps.len() {
                let mut out: Vec<DynkinDiagram> = results.into_values().collect();
                out.sort_by(|a, b| a.norms.cmp(&b.norms));
                return out;
            }
            idx[k] += 1;
            if idx[k] < per_comp[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{named_diagram, triangle};

    #[test]
    fn basic_variants() {
        assert!(crystallographic_variants(&named_diagram("[3,5,3]").unwrap()).is_empty());
        let sl = crystallographic_variants(&named_diagram("[3^{[3,3]}]").unwrap());
        assert_eq!(sl.len(), 1);
        assert!(sl[0].norms.iter().all(|&q| q == 2));
        // [4,3^{1,1,1}]: the long root is either the centre side or the leaf
        let v = crystallographic_variants(&named_diagram("[4,3^{1,1,1}]").unwrap());
        assert_eq!(v.len(), 2);
        // C~2-like path 4,4 in rank 3: (4,4,2) triangle
        let t = crystallographic_variants(&triangle(4, 4, 2).unwrap());
        assert!(!t.is_empty());
        for x in &t {
            for row in x.gram_integers() {
                assert_eq!(row.len(), 3);
            }
        }
    }
}
