//! Canonical labelling of diagrams by individualization-refinement.

use serde::{Deserialize, Serialize};

use super::CoxeterDiagram;

/// Canonical vertex order and the resulting code. Two diagrams (with
/// vertex colours) are isomorphic iff their codes are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Codes: colours in canonical order, then upper-triangle labels.
    pub code: Vec<u32>,
    /// `perm[a]` is the original vertex placed at canonical position a.
    pub perm: Vec<usize>,
}

impl CanonicalForm {
    /// The canonically ordered diagram.
    pub fn diagram(&self, d: &CoxeterDiagram) -> CoxeterDiagram {
        d.permuted(&self.perm)
    }
}

type Partition = Vec<Vec<usize>>;

fn initial_partition(d: &CoxeterDiagram, colors: &[u32]) -> Partition {
    let n = d.rank();
    let mut keyed: Vec<((u32, Vec<u8>), usize)> = (0..n)
        .map(|v| {
            let mut labels: Vec<u8> = (0..n).filter(|&u| u != v).map(|u| d.label(v, u).code()).collect();
            labels.sort_unstable();
            ((colors[v], labels), v)
        })
        .collect();
    keyed.sort();
    split_sorted(keyed)
}

fn split_sorted<K: PartialEq>(keyed: Vec<(K, usize)>) -> Partition {
    let mut out: Partition = Vec::new();
    let mut last: Option<K> = None;
    for (k, v) in keyed {
        if last.as_ref() == Some(&k) {
            out.last_mut().unwrap().push(v);
        } else {
            out.push(vec![v]);
            last = Some(k);
        }
    }
    out
}

fn refine(d: &CoxeterDiagram, mut part: Partition) -> Partition {
    loop {
        let before = part.len();
        let mut cell_of = vec![0usize; d.rank()];
        for (c, cell) in part.iter().enumerate() {
            for &v in cell {
                cell_of[v] = c;
            }
        }
        let mut next: Partition = Vec::with_capacity(part.len());
        for cell in &part {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<Vec<u8>>, usize)> = cell
                .iter()
                .map(|&v| {
                    let mut sig = vec![Vec::new(); part.len()];
                    for u in 0..d.rank() {
                        if u != v {
                            sig[cell_of[u]].push(d.label(v, u).code());
                        }
                    }
                    for s in &mut sig {
                        s.sort_unstable();
                    }
                    (sig, v)
                })
                .collect();
            keyed.sort();
            next.extend(split_sorted(keyed));
        }
        part = next;
        if part.len() == before {
            return part;
        }
    }
}

fn encode(d: &CoxeterDiagram, colors: &[u32], perm: &[usize]) -> Vec<u32> {
    let n = perm.len();
    let mut code: Vec<u32> = perm.iter().map(|&v| colors[v]).collect();
    for a in 0..n {
        for b in a + 1..n {
            code.push(d.label(perm[a], perm[b]).code() as u32);
        }
    }
    code
}

/// Swapping u and w fixes every other vertex's labels.
fn twins(d: &CoxeterDiagram, colors: &[u32], u: usize, w: usize) -> bool {
    colors[u] == colors[w]
        && (0..d.rank()).all(|x| x == u || x == w || d.label(u, x) == d.label(w, x))
}

fn search(d: &CoxeterDiagram, colors: &[u32], part: Partition, best: &mut Option<CanonicalForm>) {
    let Some(ci) = part.iter().position(|c| c.len() > 1) else {
        let perm: Vec<usize> = part.iter().map(|c| c[0]).collect();
        let code = encode(d, colors, &perm);
        if best.as_ref().is_none_or(|b| code < b.code) {
            *best = Some(CanonicalForm { code, perm });
        }
        return;
    };
    let cell = part[ci].clone();
    let mut tried: Vec<usize> = Vec::new();
    for &v in &cell {
        if tried.iter().any(|&u| twins(d, colors, u, v)) {
            continue;
        }
        tried.push(v);
        let mut next: Partition = Vec::with_capacity(part.len() + 1);
        next.extend(part[..ci].iter().cloned());
        next.push(vec![v]);
        next.push(cell.iter().copied().filter(|&u| u != v).collect());
        next.extend(part[ci + 1..].iter().cloned());
        search(d, colors, refine(d, next), best);
    }
}

/// Canonical form of a diagram with optional vertex colours.
pub fn canonical_form(d: &CoxeterDiagram, colors: Option<&[u32]>) -> CanonicalForm {
    let default = vec![0u32; d.rank()];
    let colors = colors.unwrap_or(&default);
    let part = refine(d, initial_partition(d, colors));
    let mut best = None;
    search(d, colors, part, &mut best);
    best.expect("at least one leaf")
}

/// All colour-preserving automorphisms, as maps `v ↦ sigma[v]`.
pub fn automorphisms(d: &CoxeterDiagram, colors: Option<&[u32]>) -> Vec<Vec<usize>> {
    let n = d.rank();
    let default = vec![0u32; n];
    let colors = colors.unwrap_or(&default);
    let part = refine(d, initial_partition(d, colors));
    let mut cell_of = vec![0usize; n];
    for (c, cell) in part.iter().enumerate() {
        for &v in cell {
            cell_of[v] = c;
        }
    }
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(
        d: &CoxeterDiagram,
        cell_of: &[usize],
        v: usize,
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = d.rank();
        if v == n {
            out.push(image.clone());
            return;
        }
        for w in 0..n {
            if used[w] || cell_of[w] != cell_of[v] {
                continue;
            }
            if (0..v).any(|u| d.label(u, v) != d.label(image[u], w)) {
                continue;
            }
            image[v] = w;
            used[w] = true;
            extend(d, cell_of, v + 1, image, used, out);
            used[w] = false;
        }
        image[v] = usize::MAX;
    }
    extend(d, &cell_of, 0, &mut image, &mut used, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_diagram(n: usize, labels: &[u32]) -> CoxeterDiagram {
        let mut e = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j, labels[k % labels.len()]));
                k += 1;
            }
        }
        CoxeterDiagram::from_label_edges(n, &e).unwrap()
    }

    #[test]
    fn automorphism_counts() {
        let k4 = random_diagram(4, &[3]);
        assert_eq!(automorphisms(&k4, None).len(), 24);
        let star = CoxeterDiagram::from_label_edges(6, &[(0, 1, 3), (0, 2, 3), (0, 3, 3), (0, 4, 3), (0, 5, 3)]).unwrap();
        assert_eq!(automorphisms(&star, None).len(), 120);
    }

    proptest! {
        #[test]
        fn canonical_form_is_relabel_invariant(
            n in 2usize..8,
            raw in proptest::collection::vec(prop_oneof![Just(2u32), Just(3), Just(4), Just(0)], 28),
            seed in any::<u64>(),
        ) {
            let d = random_diagram(n, &raw[..n * (n - 1) / 2]);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let e = d.permuted(&perm);
            prop_assert_eq!(canonical_form(&d, None).code, canonical_form(&e, None).code);
            let cf = canonical_form(&d, None);
            prop_assert_eq!(encode(&d, &vec![0; n], &cf.perm), cf.code);
        }
    }
}
