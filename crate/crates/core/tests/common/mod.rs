//! Brute-force mirror enumeration for equal-rank embeddings into a
//! crystallographic group, independent of the chamber search and of the
//! root descent in the library.

#![allow(dead_code)]

use simplex_embed::diagrams::{crystallographic_variants, CoxeterDiagram, DynkinDiagram};

pub struct Lattice {
    pub gram: Vec<Vec<i64>>,
    pub norms: Vec<i64>,
}

impl Lattice {
    pub fn new(v: &DynkinDiagram) -> Self {
        let gram: Vec<Vec<i64>> =
            v.gram_integers().iter().map(|r| r.iter().map(|x| x.try_into().unwrap()).collect()).collect();
        let norms = (0..gram.len()).map(|i| gram[i][i]).collect();
        Lattice { gram, norms }
    }

    pub fn dot(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.gram.iter().enumerate() {
            s += a[i] * row.iter().zip(b).map(|(g, x)| g * x).sum::<i64>();
        }
        s
    }

    /// Greedy descent: a positive vector is a real root iff repeatedly
    /// reflecting in simple roots it pairs positively with ends at a
    /// simple root.
    pub fn is_positive_real_root(&self, x: &[i64]) -> bool {
        let n = x.len();
        let mut x = x.to_vec();
        loop {
            if x.iter().any(|&c| c < 0) || x.iter().all(|&c| c == 0) {
                return false;
            }
            if x.iter().sum::<i64>() == 1 {
                return true;
            }
            let mut moved = false;
            for i in 0..n {
                let p: i64 = self.gram[i].iter().zip(&x).map(|(g, c)| g * c).sum();
                if p > 0 {
                    if (2 * p) % self.norms[i] != 0 {
                        return false;
                    }
                    x[i] -= 2 * p / self.norms[i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                return false;
            }
        }
    }

    /// Positive real roots with every coordinate at most `bound`.
    pub fn roots(&self, bound: i64) -> Vec<Vec<i64>> {
        let n = self.gram.len();
        let side = (bound + 1) as usize;
        let mut out = Vec::new();
        for mut c in 1..side.pow(n as u32) {
            let x: Vec<i64> = (0..n)
                .map(|_| {
                    let d = (c % side) as i64;
                    c /= side;
                    d
                })
                .collect();
            if self.is_positive_real_root(&x) {
                out.push(x);
            }
        }
        out
    }
}

/// 4cos²(π/m) for the labels a crystallographic Gram can carry.
fn four_cos_sq(m: Option<u32>) -> Option<i64> {
    match m {
        None => Some(4),
        Some(2) => Some(0),
        Some(3) => Some(1),
        Some(4) => Some(2),
        Some(6) => Some(3),
        _ => None,
    }
}

/// Roots β_i of G, one per vertex of H, with (β_i, β_j) ≤ 0 and
/// 4(β_i, β_j)² = 4cos²(π/m_ij)·q_i·q_j. `None` when no such tuple has
/// coordinates within `bound`.
pub fn brute_embedding(h: &CoxeterDiagram, g: &CoxeterDiagram, bound: i64) -> Option<Vec<Vec<i64>>> {
    let v = crystallographic_variants(g).into_iter().next()?;
    let lat = Lattice::new(&v);
    let n = h.rank();
    let mut f = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                f[i][j] = four_cos_sq(h.label(i, j).order())?;
            }
        }
    }
    let pos = lat.roots(bound);
    let mut all: Vec<Vec<i64>> = pos.clone();
    all.extend(pos.iter().map(|r| r.iter().map(|c| -c).collect::<Vec<_>>()));
    let q: Vec<i64> = all.iter().map(|r| lat.dot(r, r)).collect();
    // forward checking: every later vertex keeps the candidates compatible
    // with all roots chosen so far; a configuration and its negative are
    // both solutions, so the first root can be taken positive
    fn extend(lat: &Lattice, all: &[Vec<i64>], q: &[i64], f: &[Vec<i64>], cands: Vec<Vec<usize>>, chosen: &mut Vec<usize>) -> bool {
        let k = chosen.len();
        if k == f.len() {
            return true;
        }
        for &c in &cands[k] {
            let mut next = cands.clone();
            let mut dead = false;
            for t in k + 1..f.len() {
                next[t].retain(|&d| {
                    let p = lat.dot(&all[c], &all[d]);
                    p <= 0 && 4 * p * p == f[k][t] * q[c] * q[d]
                });
                dead |= next[t].is_empty();
            }
            if dead {
                continue;
            }
            chosen.push(c);
            if extend(lat, all, q, f, next, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut cands = vec![(0..all.len()).collect::<Vec<_>>(); n];
    cands[0].truncate(pos.len());
    let mut chosen = Vec::new();
    extend(&lat, &all, &q, &f, cands, &mut chosen).then(|| chosen.iter().map(|&c| all[c].clone()).collect())
}

use rand::seq::SliceRandom;
use rand::Rng;
use simplex_embed::chamber_search::area_index;
use simplex_embed::diagrams::{classify, enumerate_simplicial, triangle, LabelSet};

fn triangles(labels: &[u32]) -> Vec<CoxeterDiagram> {
    let mut out = Vec::new();
    for (a, &p) in labels.iter().enumerate() {
        for (b, &q) in labels.iter().enumerate().skip(a) {
            for &r in &labels[b..] {
                if let Ok(t) = triangle(p, q, r) {
                    if classify(&t).is_hyperbolic_simplicial() {
                        out.push(t);
                    }
                }
            }
        }
    }
    out
}

/// Equal-rank pairs (H, G) with G crystallographic of rank 3 to 5. For
/// triangles only pairs with an integral area ratio are kept.
pub fn random_pairs(rng: &mut impl Rng, per_rank: [usize; 3]) -> Vec<(CoxeterDiagram, CoxeterDiagram)> {
    let mut out = Vec::new();
    for (k, rank) in (3..=5).enumerate() {
        let (hs, gs) = if rank == 3 {
            (triangles(&[0, 2, 3, 4, 5, 6, 7]), triangles(&[0, 2, 3, 4, 6]))
        } else {
            let all = enumerate_simplicial(rank, &LabelSet::Unrestricted).unwrap();
            (all.clone(), all)
        };
        let gs: Vec<_> = gs.into_iter().filter(|g| !crystallographic_variants(g).is_empty()).collect();
        let mut pool: Vec<(CoxeterDiagram, CoxeterDiagram)> = Vec::new();
        for g in &gs {
            for h in &hs {
                if rank > 3 || area_index(h, g).is_some_and(|a| a.is_integral()) {
                    pool.push((h.clone(), g.clone()));
                }
            }
        }
        out.extend(pool.choose_multiple(rng, per_rank[k]).cloned());
    }
    out
}

use simplex_embed::diagrams::{gram_of, surgery_rule_label, visual_subgroup, Normalization, VisualVertex};
use simplex_embed::scalars::{bilinear, FieldScalar};

/// Random shrink edges of random diagrams: the generators recomputed from
/// the unit Gram matrix as v* = s_i(e_j) = e_j − 2⟨e_j, e_i⟩ e_i must have
/// the surgered diagram's Gram matrix off the dotted pairs. Panics on a
/// mismatch; returns the number of cases checked.
pub fn visual_gram_checks(all: &[CoxeterDiagram], cases: usize, rng: &mut impl Rng) -> usize {
    let mut checked = 0;
    while checked < cases {
        let d = all.choose(rng).unwrap();
        let edges = d.edges();
        let Some(&(a, b, m)) = edges.choose(rng) else { continue };
        let (i, j) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        let vs = visual_subgroup(d, (i, j), None).expect("edge");
        let n = d.rank();
        let g = gram_of(d, &Normalization::Unit);
        let unit = |k: usize| -> Vec<FieldScalar> {
            (0..n).map(|t| if t == k { FieldScalar::one() } else { FieldScalar::zero() }).collect()
        };
        let two = FieldScalar::from_integer(2);
        let mut star = unit(j);
        star[i] = &star[i] - &(&two * &g[i][j]);
        let normals: Vec<Vec<FieldScalar>> = vs
            .vertices
            .iter()
            .map(|v| match v {
                VisualVertex::Star => star.clone(),
                VisualVertex::Original(k) => unit(*k),
            })
            .collect();
        assert_eq!(normals, vs.generators);
        let surgered = gram_of(&vs.diagram, &Normalization::Unit);
        for x in 0..normals.len() {
            assert_eq!(bilinear(&g, &normals[x], &normals[x]), FieldScalar::one());
            for y in x + 1..normals.len() {
                let p = bilinear(&g, &normals[x], &normals[y]);
                assert_eq!(p, vs.gram[x][y]);
                if vs.dotted.contains(&(x, y)) {
                    assert!((&p + &FieldScalar::one()).is_negative());
                } else {
                    assert_eq!(p, surgered[x][y], "{x} {y}");
                }
                if let (VisualVertex::Star, VisualVertex::Original(k), Some(3)) = (vs.vertices[x], vs.vertices[y], m.order()) {
                    assert_eq!(vs.marks[x][y], Some(surgery_rule_label(d, i, j, k)));
                }
            }
        }
        checked += 1;
    }
    checked
}
