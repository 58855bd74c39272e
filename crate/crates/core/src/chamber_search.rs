//! Anchored search for a reflection subgroup H inside G.
//!
//! A finite maximal parabolic H₁ = H ∖ {j} is placed on a standard
//! parabolic of G. The missing mirror must meet the ball B_R(O) around a
//! base point O on the face cut out by the anchor mirrors, so every chamber
//! meeting the ball is visited by breadth-first search over the chamber
//! graph and each of its facet mirrors is tested against the angles that
//! Σ(H) prescribes.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::hash::Hash;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagrams::{
    automorphisms, classify, crystallographic_variants, gram_of, induced_embeddings, CoxeterDiagram, Normalization,
};
use crate::lorentz::{
    altitude, base_point, search_radius, sqrt_rational, triangle_area_over_pi, truncated_diameter, ApproxPoint,
    LorentzError, Realization, SearchRadius, VertexKind,
};
use crate::scalars::{dot, CertifiedInterval, FieldScalar, Matrix, Sign};

pub const DEFAULT_MAX_CHAMBERS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("{0} is not a hyperbolic simplex diagram")]
    NotSimplicial(&'static str),
    #[error("rank of H ({h}) exceeds rank of G ({g})")]
    RankMismatch { h: usize, g: usize },
    #[error("vertex {0} of H is not a valid missing vertex")]
    BadMissingVertex(usize),
    #[error(transparent)]
    Lorentz(#[from] LorentzError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Chamber budget per anchor; exceeding it gives `inconclusive`.
    pub max_chambers: usize,
    /// Report every certificate instead of stopping at the first.
    pub all: bool,
    /// Vertex of H whose generator is searched for (auto when `None`).
    pub missing_vertex: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_chambers: DEFAULT_MAX_CHAMBERS, all: false, missing_vertex: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Found,
    NotFound,
    Inapplicable,
    Inconclusive,
}

/// H₁ = H ∖ {missing} placed in G. For a standard anchor, H vertex
/// `h_vertices[t]` goes to the simple mirror `g_vertices[t]`. Otherwise
/// `roots` holds the mirrors of H₁ (ambient coordinates) and `g_vertices`
/// lists the simple mirrors through the vertex of G that they fix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicAnchor {
    pub missing: usize,
    pub h_vertices: Vec<usize>,
    pub g_vertices: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Vec<FieldScalar>>>,
}

impl ParabolicAnchor {
    pub fn is_standard(&self) -> bool {
        self.roots.is_none()
    }

    /// Anchor mirror normals in the order of `h_vertices`.
    pub fn mirror_normals(&self, n: usize) -> Vec<Vec<FieldScalar>> {
        match &self.roots {
            Some(r) => r.clone(),
            None => self.g_vertices.iter().map(|&v| crate::lorentz::unit_basis(n, v)).collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("expected {expected} roots, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("root {0} has the wrong dimension")]
    BadDimension(usize),
    #[error("root {0} is not spacelike")]
    NotSpacelike(usize),
    #[error("normalized product of roots {0} and {1} cannot be computed exactly")]
    Irrational(usize, usize),
    #[error("normalized product of roots {i} and {j} is {found}, expected {expected}")]
    Mismatch { i: usize, j: usize, found: String, expected: String },
    #[error("ambient diagram is not a hyperbolic simplex")]
    BadAmbient,
    #[error("root {0} is not a mirror normal of the ambient group")]
    NotAMirror(usize),
}

/// Roots in G (coordinates over G's simple normals, scaled by
/// `ambient_norms` or unit) whose normalized Gram is Σ(H)'s unit Gram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub ambient: CoxeterDiagram,
    pub ambient_norms: Option<Vec<u32>>,
    pub target: CoxeterDiagram,
    /// Indexed by the vertices of the target.
    pub roots: Vec<Vec<FieldScalar>>,
}

/// ⟨a,b⟩/√(⟨a,a⟩⟨b,b⟩), exact when ⟨a,a⟩⟨b,b⟩ has a square root in the field.
pub(crate) fn normalized_product(r: &Realization, a: &[FieldScalar], b: &[FieldScalar]) -> Option<FieldScalar> {
    let ab = r.inner(a, b);
    let den = r.inner(a, a) * r.inner(b, b);
    if den.is_one() {
        return Some(ab);
    }
    let root = sqrt_rational(&den.to_rational()?)?;
    ab.checked_div(&root).ok()
}

/// Descent steps allowed before a vector is declared not to be a mirror.
pub const MIRROR_DESCENT_STEPS: usize = 100_000;

/// Whether `v` is normal to a mirror of G. Roots have coefficients of one
/// sign; reflecting in a simple normal that pairs positively with a
/// positive root gives a shorter positive root, down to a multiple of a
/// simple normal.
pub fn is_mirror(r: &Realization, v: &[FieldScalar]) -> bool {
    let n = r.rank();
    let mut x: Vec<FieldScalar> = if v.iter().any(FieldScalar::is_negative) { v.iter().map(|c| -c).collect() } else { v.to_vec() };
    for _ in 0..MIRROR_DESCENT_STEPS {
        if x.iter().any(FieldScalar::is_negative) {
            return false;
        }
        if x.iter().filter(|c| !c.is_zero()).count() <= 1 {
            return x.iter().any(|c| !c.is_zero());
        }
        let bx = r.lower(&x);
        let Some(i) = (0..n).find(|&i| bx[i].is_positive()) else { return false };
        x = r.reflect(&x, &r.simple_normal(i));
    }
    false
}

impl EmbeddingCertificate {
    /// Independent exact check: every root is a mirror normal of G, and
    /// every normalized product is recomputed from the ambient Gram form.
    pub fn verify(&self) -> Result<(), CertificateError> {
        let n = self.target.rank();
        if self.roots.len() != n {
            return Err(CertificateError::WrongCount { expected: n, got: self.roots.len() });
        }
        let g = match &self.ambient_norms {
            Some(q) if q.len() == self.ambient.rank() => gram_of(&self.ambient, &Normalization::Root(q)),
            Some(_) => return Err(CertificateError::BadAmbient),
            None => gram_of(&self.ambient, &Normalization::Unit),
        };
        let r = Realization::new(&self.ambient, self.ambient_norms.as_deref()).map_err(|_| CertificateError::BadAmbient)?;
        debug_assert_eq!(r.gram, g);
        for (i, v) in self.roots.iter().enumerate() {
            if v.len() != self.ambient.rank() {
                return Err(CertificateError::BadDimension(i));
            }
            if !r.inner(v, v).is_positive() {
                return Err(CertificateError::NotSpacelike(i));
            }
            if !is_mirror(&r, v) {
                return Err(CertificateError::NotAMirror(i));
            }
        }
        let target = gram_of(&self.target, &Normalization::Unit);
        for i in 0..n {
            for j in i + 1..n {
                let p = normalized_product(&r, &self.roots[i], &self.roots[j])
                    .ok_or(CertificateError::Irrational(i, j))?;
                if p != target[i][j] {
                    return Err(CertificateError::Mismatch {
                        i,
                        j,
                        found: p.to_string(),
                        expected: target[i][j].to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A far facet mirror: the chamber behind it lies in {⟨x,e⟩ ≤ 0} while
/// ⟨O,e⟩ > 0 and ρ(O, e) > R.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneWitness {
    pub normal: Vec<FieldScalar>,
    pub inner_lo: f64,
    pub distance_lo: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnchorRun {
    pub anchor: ParabolicAnchor,
    pub base_point: ApproxPoint,
    pub radius: SearchRadius,
    pub outcome: Verdict,
    pub chambers_expanded: usize,
    pub chambers_pruned: usize,
    pub mirrors_tested: usize,
    /// Distinct pruning mirrors (for `not-found` runs).
    pub frontier: Vec<PruneWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaIndex {
    pub h_area_over_pi: BigRational,
    pub g_area_over_pi: BigRational,
    pub ratio: BigRational,
}

impl AreaIndex {
    pub fn is_integral(&self) -> bool {
        self.ratio.is_integer() && self.ratio.is_positive()
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub chambers_expanded: usize,
    pub chambers_pruned: usize,
    pub mirrors_tested: usize,
    pub anchors: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchReport {
    pub verdict: Verdict,
    pub h: CoxeterDiagram,
    pub g: CoxeterDiagram,
    pub options: SearchOptions,
    pub missing_vertex: Option<usize>,
    pub certificates: Vec<EmbeddingCertificate>,
    pub runs: Vec<AnchorRun>,
    pub area_index: Option<AreaIndex>,
    pub stats: SearchStats,
    pub note: Option<String>,
}

/// Vertices j of H whose link H ∖ {j} is finite (ordinary vertices).
pub fn finite_maximal_parabolics(h: &CoxeterDiagram) -> Vec<usize> {
    (0..h.rank())
        .filter(|&j| {
            let s = classify(&h.without(j)).signature;
            s.1 == 0 && s.2 == 0
        })
        .collect()
}

/// Label-preserving placements of H ∖ {missing} on G's simple mirrors, one
/// per orbit of Aut(Σ(G)) × Aut(Σ(H), missing).
pub fn enumerate_anchors(h: &CoxeterDiagram, g: &CoxeterDiagram, missing: usize) -> Vec<ParabolicAnchor> {
    let h_vertices: Vec<usize> = (0..h.rank()).filter(|&v| v != missing).collect();
    let h1 = h.subdiagram(&h_vertices);
    let auts = automorphisms(g, None);
    // symmetries of Σ(H) fixing the missing vertex, as permutations of H₁
    let h_auts: Vec<Vec<usize>> = automorphisms(h, None)
        .into_iter()
        .filter(|t| t[missing] == missing)
        .map(|t| h_vertices.iter().map(|v| h_vertices.iter().position(|w| *w == t[*v]).unwrap()).collect())
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for emb in induced_embeddings(&h1, g) {
        let e = &emb;
        let rep = h_auts
            .iter()
            .flat_map(|t| auts.iter().map(move |s| t.iter().map(|&k| s[e[k]]).collect::<Vec<usize>>()))
            .min()
            .unwrap_or_else(|| emb.clone());
        if seen.insert(rep) {
            out.push(ParabolicAnchor { missing, h_vertices: h_vertices.clone(), g_vertices: emb, roots: None });
        }
    }
    out
}

fn sign_normalized(x: &[FieldScalar]) -> Vec<FieldScalar> {
    if x.iter().find(|a| !a.is_zero()).is_some_and(|a| a.is_negative()) {
        x.iter().map(|a| -a).collect()
    } else {
        x.to_vec()
    }
}

/// Roots of the finite vertex stabilizer at the ordinary vertex v: the
/// orbit of the simple normals e_i (i ≠ v) under their reflections.
pub fn vertex_stabilizer_roots(r: &Realization, v: usize) -> Vec<Vec<FieldScalar>> {
    let gens: Vec<Vec<FieldScalar>> = (0..r.rank()).filter(|&i| i != v).map(|i| r.simple_normal(i)).collect();
    let mut seen: HashSet<Vec<FieldScalar>> = gens.iter().cloned().collect();
    let mut out = gens.clone();
    let mut k = 0;
    while k < out.len() {
        let x = out[k].clone();
        k += 1;
        for e in &gens {
            let y = r.reflect(&x, e);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
    }
    out
}

/// Placements of H ∖ {missing} as a reflection subgroup of some finite
/// vertex stabilizer of G, with the mirrors fixing that vertex. One vertex
/// per orbit of Aut(Σ(G)); placements are identified up to the stabilizer's
/// own action. Only needed when rk H = rk G, where H₁ need not be parabolic.
pub fn vertex_anchors(h: &CoxeterDiagram, g_real: &Realization, missing: usize) -> Vec<ParabolicAnchor> {
    let g = &g_real.diagram;
    let n = g.rank();
    let h_vertices: Vec<usize> = (0..h.rank()).filter(|&v| v != missing).collect();
    let target = gram_of(&h.subdiagram(&h_vertices), &Normalization::Unit);
    let k = h_vertices.len();
    let auts = automorphisms(g, None);
    let mut out = Vec::new();
    let mut done_vertices = HashSet::new();
    for v in 0..n {
        if g_real.vertices[v].kind != VertexKind::Ordinary {
            continue;
        }
        if !done_vertices.insert(auts.iter().map(|s| s[v]).min().unwrap_or(v)) {
            continue;
        }
        let roots = vertex_stabilizer_roots(g_real, v);
        let m = roots.len();
        let mut prod = vec![vec![None; m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let p = normalized_product(g_real, &roots[a], &roots[b]);
                prod[a][b] = p.clone();
                prod[b][a] = p;
            }
        }
        // ordered k-tuples with the prescribed normalized Gram
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        fn go(
            prod: &[Vec<Option<FieldScalar>>],
            target: &Matrix,
            k: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            let t = cur.len();
            if t == k {
                out.push(cur.clone());
                return;
            }
            for c in 0..prod.len() {
                if cur.iter().enumerate().all(|(s, &a)| prod[a][c].as_ref() == Some(&target[s][t])) {
                    cur.push(c);
                    go(prod, target, k, cur, out);
                    cur.pop();
                }
            }
        }
        go(&prod, &target, k, &mut cur, &mut tuples);
        let gens: Vec<Vec<FieldScalar>> = (0..n).filter(|&i| i != v).map(|i| g_real.simple_normal(i)).collect();
        let key = |t: &[Vec<FieldScalar>]| t.iter().map(|x| sign_normalized(x)).collect::<Vec<_>>();
        let mut seen: HashSet<Vec<Vec<FieldScalar>>> = HashSet::new();
        for t in tuples {
            let tuple: Vec<Vec<FieldScalar>> = t.iter().map(|&a| roots[a].clone()).collect();
            let k0 = key(&tuple);
            if seen.contains(&k0) {
                continue;
            }
            // mark the whole stabilizer orbit of this placement
            seen.insert(k0.clone());
            let mut queue = vec![k0];
            while let Some(x) = queue.pop() {
                for e in &gens {
                    let y: Vec<Vec<FieldScalar>> = x.iter().map(|r| sign_normalized(&g_real.reflect(r, e))).collect();
                    if seen.insert(y.clone()) {
                        queue.push(y);
                    }
                }
            }
            out.push(ParabolicAnchor {
                missing,
                h_vertices: h_vertices.clone(),
                g_vertices: (0..n).filter(|&i| i != v).collect(),
                roots: Some(tuple),
            });
        }
    }
    out
}

/// Anchors used by the search: standard parabolics when rk H < rk G, all
/// placements in vertex stabilizers when the ranks agree.
pub fn search_anchors(h: &CoxeterDiagram, g_real: &Realization, missing: usize) -> Vec<ParabolicAnchor> {
    if h.rank() == g_real.rank() {
        vertex_anchors(h, g_real, missing)
    } else {
        enumerate_anchors(h, &g_real.diagram, missing)
    }
}

// ---------------------------------------------------------------------
// Vector arithmetic: machine integers for crystallographic root lattices,
// exact field elements otherwise.

trait Space: Sync {
    type S: Clone + Send + Sync;
    type V: Clone + Eq + Hash + Ord + Send + Sync;
    fn rank(&self) -> usize;
    fn simple(&self, i: usize) -> Self::V;
    fn lower(&self, x: &Self::V) -> Vec<Self::S>;
    fn dot(&self, x: &Self::V, l: &[Self::S]) -> Self::S;
    /// x − 2⟨x,e⟩/⟨e,e⟩·e, given B·e and ⟨e,e⟩; `None` on overflow.
    fn reflect(&self, x: &Self::V, e: &Self::V, el: &[Self::S], ee: &Self::S) -> Option<Self::V>;
    fn neg(&self, x: &Self::V) -> Self::V;
    fn coord_intervals(&self, x: &Self::V) -> Vec<CertifiedInterval>;
    fn scalar_interval(&self, s: &Self::S) -> CertifiedInterval;
    fn to_field(&self, x: &Self::V) -> Vec<FieldScalar>;
    /// Sign of ⟨u,w⟩ when ⟨u,w⟩² = c2·⟨u,u⟩⟨w,w⟩ exactly.
    fn angle(&self, uw: &Self::S, uu: &Self::S, ww: &Self::S, c2: &FieldScalar) -> Option<Sign>;
    fn is_negative_coord_first(&self, x: &Self::V) -> bool;
    fn from_field(&self, x: &[FieldScalar]) -> Option<Self::V>;
}

struct IntSpace {
    b: Vec<Vec<i64>>,
}

impl Space for IntSpace {
    type S = i128;
    type V = Vec<i64>;

    fn rank(&self) -> usize {
        self.b.len()
    }

    fn simple(&self, i: usize) -> Vec<i64> {
        (0..self.rank()).map(|k| (k == i) as i64).collect()
    }

    fn lower(&self, x: &Vec<i64>) -> Vec<i128> {
        self.b.iter().map(|row| row.iter().zip(x).map(|(a, b)| *a as i128 * *b as i128).sum()).collect()
    }

    fn dot(&self, x: &Vec<i64>, l: &[i128]) -> i128 {
        x.iter().zip(l).map(|(a, b)| *a as i128 * b).sum()
    }

    fn reflect(&self, x: &Vec<i64>, e: &Vec<i64>, el: &[i128], ee: &i128) -> Option<Vec<i64>> {
        let xe = self.dot(x, el);
        let two = 2 * xe;
        if two % ee != 0 {
            return None;
        }
        let f = two / ee;
        x.iter()
            .zip(e)
            .map(|(a, b)| i64::try_from(*a as i128 - f * *b as i128).ok())
            .collect()
    }

    fn neg(&self, x: &Vec<i64>) -> Vec<i64> {
        x.iter().map(|a| -a).collect()
    }

    fn coord_intervals(&self, x: &Vec<i64>) -> Vec<CertifiedInterval> {
        x.iter().map(|&a| exact_interval(a as i128)).collect()
    }

    fn scalar_interval(&self, s: &i128) -> CertifiedInterval {
        exact_interval(*s)
    }

    fn to_field(&self, x: &Vec<i64>) -> Vec<FieldScalar> {
        x.iter().map(|&a| FieldScalar::from_integer(a)).collect()
    }

    fn angle(&self, uw: &i128, uu: &i128, ww: &i128, c2: &FieldScalar) -> Option<Sign> {
        let q = c2.to_rational()?;
        let (num, den) = (q.numer().to_i128()?, q.denom().to_i128()?);
        let lhs = uw.checked_mul(*uw)?.checked_mul(den)?;
        let rhs = uu.checked_mul(*ww)?.checked_mul(num)?;
        (lhs == rhs).then(|| match uw.cmp(&0) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        })
    }

    fn is_negative_coord_first(&self, x: &Vec<i64>) -> bool {
        x.iter().find(|a| **a != 0).is_some_and(|a| *a < 0)
    }

    fn from_field(&self, x: &[FieldScalar]) -> Option<Vec<i64>> {
        x.iter().map(|a| a.to_integer().and_then(|v| v.to_i64())).collect()
    }
}

fn exact_interval(a: i128) -> CertifiedInterval {
    let f = a as f64;
    if (f as i128) == a && f.abs() < 9.0e15 {
        CertifiedInterval::point(f)
    } else {
        CertifiedInterval::new(f.next_down(), f.next_up())
    }
}

/// Field vectors ordered structurally, for chamber keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct FVec(Vec<FieldScalar>);

impl PartialOrd for FVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FVec {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.structural_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

struct FieldSpace {
    b: Matrix,
}

impl Space for FieldSpace {
    type S = FieldScalar;
    type V = FVec;

    fn rank(&self) -> usize {
        self.b.len()
    }

    fn simple(&self, i: usize) -> FVec {
        FVec(crate::lorentz::unit_basis(self.rank(), i))
    }

    fn lower(&self, x: &FVec) -> Vec<FieldScalar> {
        crate::scalars::mat_vec(&self.b, &x.0)
    }

    fn dot(&self, x: &FVec, l: &[FieldScalar]) -> FieldScalar {
        dot(&x.0, l)
    }

    fn reflect(&self, x: &FVec, e: &FVec, el: &[FieldScalar], ee: &FieldScalar) -> Option<FVec> {
        let f = (self.dot(x, el) * FieldScalar::from_integer(2)).checked_div(ee).ok()?;
        if f.is_zero() {
            return Some(x.clone());
        }
        Some(FVec(x.0.iter().zip(&e.0).map(|(a, b)| a - &(&f * b)).collect()))
    }

    fn neg(&self, x: &FVec) -> FVec {
        FVec(x.0.iter().map(|a| -a).collect())
    }

    fn coord_intervals(&self, x: &FVec) -> Vec<CertifiedInterval> {
        x.0.iter().map(CertifiedInterval::from_field).collect()
    }

    fn scalar_interval(&self, s: &FieldScalar) -> CertifiedInterval {
        CertifiedInterval::from_field(s)
    }

    fn to_field(&self, x: &FVec) -> Vec<FieldScalar> {
        x.0.clone()
    }

    fn angle(&self, uw: &FieldScalar, uu: &FieldScalar, ww: &FieldScalar, c2: &FieldScalar) -> Option<Sign> {
        (uw.square() == c2 * &(uu * ww)).then(|| uw.sign())
    }

    fn is_negative_coord_first(&self, x: &FVec) -> bool {
        x.0.iter().find(|a| !a.is_zero()).is_some_and(|a| a.is_negative())
    }

    fn from_field(&self, x: &[FieldScalar]) -> Option<FVec> {
        Some(FVec(x.to_vec()))
    }
}

// ---------------------------------------------------------------------

struct AnchorSetup<'a, Sp: Space> {
    space: &'a Sp,
    o_low: Vec<CertifiedInterval>,
    o_norm: CertifiedInterval,
    r_hi: f64,
    /// Anchor roots with B·w, ⟨w,w⟩ and target cos² to the missing mirror.
    anchors: Vec<(Sp::V, Vec<Sp::S>, Sp::S, FieldScalar)>,
    anchor_keys: Vec<Sp::V>,
    max_chambers: usize,
    all: bool,
}

struct RunResult<V> {
    outcome: Verdict,
    found: Vec<V>,
    expanded: usize,
    pruned: usize,
    tested: usize,
    frontier: Vec<(V, f64, f64)>,
}

impl<Sp: Space> AnchorSetup<'_, Sp> {
    fn mirror_key(&self, e: &Sp::V) -> Sp::V {
        if self.space.is_negative_coord_first(e) {
            self.space.neg(e)
        } else {
            e.clone()
        }
    }

    /// Lower bound on ρ(O, mirror e) when O is strictly on the positive side.
    fn far_side(&self, e: &Sp::V) -> Option<(f64, f64)> {
        let coords = self.space.coord_intervals(e);
        let oe = self
            .o_low
            .iter()
            .zip(&coords)
            .fold(CertifiedInterval::zero(), |acc, (a, b)| acc.add(&a.mul(b)));
        if !oe.certainly_positive() {
            return None;
        }
        let el = self.space.lower(e);
        let ee = self.space.scalar_interval(&self.space.dot(e, &el));
        let s = oe.div(&self.o_norm.mul(&ee).sqrt())?;
        let d = s.asinh();
        (d.lo > self.r_hi).then_some((oe.lo, d.lo))
    }

    /// Oriented copy of u if it makes the prescribed angles with the anchor.
    fn angle_test(&self, u: &Sp::V) -> Option<Sp::V> {
        let key = self.mirror_key(u);
        if self.anchor_keys.contains(&key) {
            return None;
        }
        let ul = self.space.lower(u);
        let uu = self.space.dot(u, &ul);
        let mut sign = Sign::Zero;
        for (w, wl, ww, c2) in &self.anchors {
            let _ = w;
            let uw = self.space.dot(u, wl);
            match self.space.angle(&uw, &uu, ww, c2)? {
                Sign::Zero => {}
                s if sign == Sign::Zero => sign = s,
                s if s != sign => return None,
                _ => {}
            }
        }
        Some(if sign == Sign::Positive { self.space.neg(u) } else { u.clone() })
    }

    fn run(&self, cancel: impl Fn() -> bool) -> RunResult<Sp::V> {
        let n = self.space.rank();
        let start: Vec<Sp::V> = (0..n).map(|i| self.space.simple(i)).collect();
        let key = |ch: &[Sp::V]| {
            let mut k = ch.to_vec();
            k.sort();
            k
        };
        let mut seen: HashSet<Vec<Sp::V>> = HashSet::new();
        seen.insert(key(&start));
        let mut queue = VecDeque::from([start]);
        let mut tested: HashSet<Sp::V> = HashSet::new();
        let mut frontier: Vec<(Sp::V, f64, f64)> = Vec::new();
        let mut frontier_keys: HashSet<Sp::V> = HashSet::new();
        let mut res = RunResult { outcome: Verdict::NotFound, found: Vec::new(), expanded: 0, pruned: 0, tested: 0, frontier: Vec::new() };
        while let Some(ch) = queue.pop_front() {
            if let Some((e, bounds)) = ch.iter().find_map(|e| self.far_side(e).map(|b| (e, b))) {
                res.pruned += 1;
                let k = self.mirror_key(e);
                if frontier_keys.insert(k) {
                    frontier.push((e.clone(), bounds.0, bounds.1));
                }
                continue;
            }
            res.expanded += 1;
            if res.expanded > self.max_chambers || (res.expanded % 1024 == 0 && cancel()) {
                res.outcome = Verdict::Inconclusive;
                break;
            }
            for e in &ch {
                let k = self.mirror_key(e);
                if !tested.insert(k) {
                    continue;
                }
                res.tested += 1;
                if let Some(u) = self.angle_test(e) {
                    res.found.push(u);
                    res.outcome = Verdict::Found;
                }
            }
            if res.outcome == Verdict::Found && !self.all {
                break;
            }
            for i in 0..n {
                let e = &ch[i];
                let el = self.space.lower(e);
                let ee = self.space.dot(e, &el);
                let next: Option<Vec<Sp::V>> = ch
                    .iter()
                    .enumerate()
                    .map(|(k, v)| if k == i { Some(self.space.neg(v)) } else { self.space.reflect(v, e, &el, &ee) })
                    .collect();
                let Some(next) = next else {
                    // coordinate overflow: cannot certify exhaustion
                    res.outcome = Verdict::Inconclusive;
                    res.frontier.clear();
                    return res;
                };
                if seen.insert(key(&next)) {
                    queue.push_back(next);
                }
            }
        }
        if res.outcome == Verdict::NotFound {
            res.frontier = frontier;
        }
        if !res.found.is_empty() {
            res.outcome = Verdict::Found;
        }
        res
    }
}

/// How G is realized for the search: integer root lattice when G is
/// crystallographic, unit normals over the field otherwise.
pub fn ambient_realization(g: &CoxeterDiagram) -> Result<Realization, SearchError> {
    let variants = crystallographic_variants(g);
    let norms = variants.first().map(|v| v.norms.clone());
    Ok(Realization::new(g, norms.as_deref())?)
}

fn int_gram(r: &Realization) -> Option<Vec<Vec<i64>>> {
    r.gram
        .iter()
        .map(|row| row.iter().map(|x| x.to_integer().and_then(|v| v.to_i64())).collect())
        .collect()
}

/// Everything the search needs about one anchor, independent of the
/// arithmetic used.
#[derive(Clone, Debug)]
pub struct AnchorGeometry {
    pub anchor: ParabolicAnchor,
    pub base_point: ApproxPoint,
    pub radius: SearchRadius,
}

pub fn anchor_geometry(
    h: &CoxeterDiagram,
    g_real: &Realization,
    anchor: &ParabolicAnchor,
) -> Result<AnchorGeometry, SearchError> {
    let h_real = Realization::new(h, None)?;
    let data = truncated_diameter(g_real);
    let radius = search_radius(&h_real, anchor.missing, &data)?;
    let o = base_point(g_real, &data, &anchor.g_vertices);
    Ok(AnchorGeometry { anchor: anchor.clone(), base_point: o, radius })
}

fn run_anchor<Sp: Space>(
    space: &Sp,
    h: &CoxeterDiagram,
    g_real: &Realization,
    geom: &AnchorGeometry,
    opts: &SearchOptions,
    cancel: impl Fn() -> bool,
) -> (AnchorRun, Vec<Vec<FieldScalar>>) {
    let o = &geom.base_point;
    let n = g_real.rank();
    let mut o_low = vec![CertifiedInterval::zero(); n];
    for (c, x) in &o.terms {
        let bx = g_real.lower(x);
        for j in 0..n {
            o_low[j] = o_low[j].add(&c.mul(&CertifiedInterval::from_field(&bx[j])));
        }
    }
    let o_norm = o.inner(g_real, o).neg();
    let normals = geom.anchor.mirror_normals(n);
    let anchors: Vec<_> = geom
        .anchor
        .h_vertices
        .iter()
        .zip(&normals)
        .map(|(&hv, x)| {
            let w = space.from_field(x).expect("anchor roots lie in the root lattice");
            let wl = space.lower(&w);
            let ww = space.dot(&w, &wl);
            let c2 = h.label(geom.anchor.missing, hv).cos_squared();
            (w, wl, ww, c2)
        })
        .collect();
    let anchor_keys = anchors
        .iter()
        .map(|a| if space.is_negative_coord_first(&a.0) { space.neg(&a.0) } else { a.0.clone() })
        .collect::<Vec<_>>();
    let setup = AnchorSetup {
        space,
        o_low,
        o_norm,
        r_hi: geom.radius.r.hi,
        anchors,
        anchor_keys,
        max_chambers: opts.max_chambers,
        all: opts.all,
    };
    let res = setup.run(cancel);
    let found: Vec<Vec<FieldScalar>> = res.found.iter().map(|u| space.to_field(u)).collect();
    let run = AnchorRun {
        anchor: geom.anchor.clone(),
        base_point: geom.base_point.clone(),
        radius: geom.radius.clone(),
        outcome: res.outcome,
        chambers_expanded: res.expanded,
        chambers_pruned: res.pruned,
        mirrors_tested: res.tested,
        frontier: res
            .frontier
            .iter()
            .map(|(e, a, b)| PruneWitness { normal: space.to_field(e), inner_lo: *a, distance_lo: *b })
            .collect(),
    };
    (run, found)
}

fn certificate_for(
    h: &CoxeterDiagram,
    g_real: &Realization,
    anchor: &ParabolicAnchor,
    u: Vec<FieldScalar>,
) -> EmbeddingCertificate {
    let n = g_real.rank();
    let mut roots = vec![Vec::new(); h.rank()];
    for (&hv, x) in anchor.h_vertices.iter().zip(anchor.mirror_normals(n)) {
        roots[hv] = x;
    }
    roots[anchor.missing] = u;
    EmbeddingCertificate {
        ambient: g_real.diagram.clone(),
        ambient_norms: g_real.norms.clone(),
        target: h.clone(),
        roots,
    }
}

/// Index check for two triangle groups: the area ratio must be a positive
/// integer.
pub fn area_index(h: &CoxeterDiagram, g: &CoxeterDiagram) -> Option<AreaIndex> {
    let ha = triangle_area_over_pi(h)?;
    let ga = triangle_area_over_pi(g)?;
    if ga.is_zero() {
        return None;
    }
    let ratio = &ha / &ga;
    Some(AreaIndex { h_area_over_pi: ha, g_area_over_pi: ga, ratio })
}

/// Choose the missing vertex: among ordinary vertices of H with at least one
/// anchor in G, the one with the smallest altitude d.
pub fn choose_missing_vertex(h: &CoxeterDiagram, g_real: &Realization) -> Result<Option<usize>, SearchError> {
    let h_real = Realization::new(h, None)?;
    let mut best: Option<(f64, usize)> = None;
    for j in finite_maximal_parabolics(h) {
        if search_anchors(h, g_real, j).is_empty() {
            continue;
        }
        let d = altitude(&h_real, j)?;
        if best.is_none_or(|(bd, _)| d.hi < bd) {
            best = Some((d.hi, j));
        }
    }
    Ok(best.map(|b| b.1))
}

pub fn search_embedding(h: &CoxeterDiagram, g: &CoxeterDiagram, opts: &SearchOptions) -> Result<SearchReport, SearchError> {
    if !classify(h).is_hyperbolic_simplicial() {
        return Err(SearchError::NotSimplicial("H"));
    }
    if !classify(g).is_hyperbolic_simplicial() {
        return Err(SearchError::NotSimplicial("G"));
    }
    if h.rank() > g.rank() {
        return Err(SearchError::RankMismatch { h: h.rank(), g: g.rank() });
    }
    let mut report = SearchReport {
        verdict: Verdict::NotFound,
        h: h.clone(),
        g: g.clone(),
        options: opts.clone(),
        missing_vertex: None,
        certificates: Vec::new(),
        runs: Vec::new(),
        area_index: None,
        stats: SearchStats::default(),
        note: None,
    };
    if h.rank() == 3 && g.rank() == 3 {
        let idx = area_index(h, g).expect("triangles");
        let integral = idx.is_integral();
        report.area_index = Some(idx);
        if !integral {
            report.note = Some("area ratio is not a positive integer".into());
            return Ok(report);
        }
    }
    if finite_maximal_parabolics(h).is_empty() {
        report.verdict = Verdict::Inapplicable;
        report.note = Some("H has no finite maximal parabolic subgroup; use the Diophantine method".into());
        return Ok(report);
    }
    let g_real = ambient_realization(g)?;
    let missing = match opts.missing_vertex {
        Some(j) => {
            if j >= h.rank() || !finite_maximal_parabolics(h).contains(&j) {
                return Err(SearchError::BadMissingVertex(j));
            }
            j
        }
        None => match choose_missing_vertex(h, &g_real)? {
            Some(j) => j,
            None => {
                report.note = Some("no finite maximal parabolic of H is a parabolic subgroup of G".into());
                return Ok(report);
            }
        },
    };
    report.missing_vertex = Some(missing);
    let anchors = search_anchors(h, &g_real, missing);
    report.stats.anchors = anchors.len();
    if anchors.is_empty() {
        report.note = Some(format!("H without vertex {missing} is not a parabolic subgroup of G"));
        return Ok(report);
    }
    let geoms: Vec<AnchorGeometry> =
        anchors.iter().map(|a| anchor_geometry(h, &g_real, a)).collect::<Result<_, _>>()?;
    let first_found = AtomicUsize::new(usize::MAX);
    let int_space = g_real.norms.as_ref().and_then(|_| int_gram(&g_real)).map(|b| IntSpace { b });
    let field_space = FieldSpace { b: g_real.gram.clone() };
    let results: Vec<(AnchorRun, Vec<Vec<FieldScalar>>)> = geoms
        .par_iter()
        .enumerate()
        .map(|(idx, geom)| {
            let cancel = || !opts.all && first_found.load(AtomicOrdering::Relaxed) < idx;
            if cancel() {
                return None;
            }
            let out = match &int_space {
                Some(sp) => run_anchor(sp, h, &g_real, geom, opts, cancel),
                None => run_anchor(&field_space, h, &g_real, geom, opts, cancel),
            };
            if out.0.outcome == Verdict::Found {
                first_found.fetch_min(idx, AtomicOrdering::Relaxed);
            }
            Some(out)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let stop = first_found.load(AtomicOrdering::Relaxed);
    let mut any_inconclusive = false;
    for (idx, (run, found)) in results.into_iter().enumerate() {
        if !opts.all && idx > stop {
            break;
        }
        report.stats.chambers_expanded += run.chambers_expanded;
        report.stats.chambers_pruned += run.chambers_pruned;
        report.stats.mirrors_tested += run.mirrors_tested;
        if run.outcome == Verdict::Inconclusive {
            any_inconclusive = true;
        }
        for u in found {
            report.certificates.push(certificate_for(h, &g_real, &run.anchor, u));
        }
        report.runs.push(run);
    }
    report.verdict = if !report.certificates.is_empty() {
        Verdict::Found
    } else if any_inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::NotFound
    };
    if report.verdict == Verdict::NotFound {
        report.note = Some(
            "no embedding in which H without the missing vertex is a standard parabolic subgroup of G (covers every maximal embedding)"
                .into(),
        );
    }
    Ok(report)
}

/// Cheap part of the replay: recompute radius and base point and re-check
/// every stored pruning witness, without rerunning the search.
pub fn check_not_found_witnesses(report: &SearchReport) -> Result<(), String> {
    if report.verdict != Verdict::NotFound {
        return Err(format!("verdict is {:?}, not not-found", report.verdict));
    }
    if let Some(idx) = &report.area_index {
        if !idx.is_integral() {
            let again = area_index(&report.h, &report.g).ok_or("not triangles")?;
            return if again == *idx && !again.is_integral() { Ok(()) } else { Err("area index mismatch".into()) };
        }
    }
    let g_real = ambient_realization(&report.g).map_err(|e| e.to_string())?;
    for run in &report.runs {
        let geom = anchor_geometry(&report.h, &g_real, &run.anchor).map_err(|e| e.to_string())?;
        if geom.radius.r.hi > run.radius.r.hi {
            return Err("stored radius is smaller than the recomputed one".into());
        }
        for w in &run.frontier {
            let xe = geom.base_point.inner_exact(&g_real, &w.normal);
            let ee = CertifiedInterval::from_field(&g_real.inner(&w.normal, &w.normal));
            let oo = geom.base_point.inner(&g_real, &geom.base_point).neg();
            let s = xe.div(&oo.mul(&ee).sqrt()).ok_or("degenerate witness")?;
            if !(xe.certainly_positive() && s.asinh().lo > run.radius.r.hi) {
                return Err("pruning witness does not replay".into());
            }
        }
    }
    Ok(())
}

/// Replay a `not-found` report: check the stored witnesses, then rerun the
/// search to confirm the outcome and chamber counts.
pub fn replay_not_found(report: &SearchReport) -> Result<(), String> {
    check_not_found_witnesses(report)?;
    if report.area_index.as_ref().is_some_and(|i| !i.is_integral()) {
        return Ok(());
    }
    let again = search_embedding(&report.h, &report.g, &report.options).map_err(|e| e.to_string())?;
    if again.verdict != Verdict::NotFound || again.runs.len() != report.runs.len() {
        return Err("rerun disagrees".into());
    }
    for (a, b) in again.runs.iter().zip(&report.runs) {
        if a.chambers_expanded != b.chambers_expanded || a.frontier.len() != b.frontier.len() {
            return Err("rerun visits a different chamber set".into());
        }
    }
    Ok(())
}

/// Cheap upper bound on how many chambers of G a search will see, from the
/// radius alone; used to pick budgets.
pub fn radius_of(report: &SearchReport) -> Option<CertifiedInterval> {
    report.runs.first().map(|r| r.radius.r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{named_diagram, triangle};

    #[test]
    fn identity_embedding_found() {
        let g = named_diagram("[3,5,3]").unwrap();
        let rep = search_embedding(&g, &g, &SearchOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Found);
        rep.certificates[0].verify().unwrap();
    }

    #[test]
    fn anchors_and_inapplicable() {
        let g = named_diagram("[3^{[3,3]}]").unwrap();
        let h = triangle(0, 0, 3).unwrap();
        let j = finite_maximal_parabolics(&h);
        assert_eq!(j.len(), 1);
        assert_eq!(enumerate_anchors(&h, &g, j[0]).len(), 1);
        let rep = search_embedding(&triangle(0, 0, 0).unwrap(), &g, &SearchOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Inapplicable);
    }
}

#[cfg(test)]
mod pair_tests {
    use super::*;
    use crate::diagrams::{named_diagram, triangle};

    #[test]
    fn ideal_triangle_in_simplex() {
        let g = named_diagram("[3^{[3,3]}]").unwrap();
        let h = triangle(0, 0, 3).unwrap();
        let rep = search_embedding(&h, &g, &SearchOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Found);
        rep.certificates[0].verify().unwrap();
    }

    #[test]
    fn heptagonal_pair() {
        let g = triangle(2, 3, 7).unwrap();
        let h = triangle(3, 3, 7).unwrap();
        let rep = search_embedding(&h, &g, &SearchOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotFound);
        replay_not_found(&rep).unwrap();
    }
}

#[cfg(test)]
mod doubling_tests {
    use super::*;
    use crate::diagrams::triangle;

    #[test]
    fn doubled_triangles() {
        for (h, g) in [((3, 4, 4), (2, 4, 6)), ((3, 5, 5), (2, 5, 6)), ((2, 5, 5), (2, 4, 5))] {
            let hd = triangle(h.0, h.1, h.2).unwrap();
            let gd = triangle(g.0, g.1, g.2).unwrap();
            let rep = search_embedding(&hd, &gd, &SearchOptions::default()).unwrap();
            assert_eq!(rep.verdict, Verdict::Found);
            rep.certificates[0].verify().unwrap();
        }
    }
}
