//! Catalog, pairwise embedding runs, the recorded lattice and its
//! persistence.

mod catalog;
mod config;
mod export;
mod store;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use catalog::{diagram_id, Catalog, CatalogEntry, CatalogError, RealizationMeta, NAMED_TRIANGLES, RANK_TWO};
pub use config::{Config, ConfigError};
pub use export::{export, import_json, ExportError, Format};
pub use store::{Store, StoreError};

use crate::chamber_search::{
    check_not_found_witnesses, enumerate_anchors, finite_maximal_parabolics, replay_not_found, search_embedding,
    EmbeddingCertificate, SearchOptions, SearchReport, Verdict,
};
use crate::diagrams::{
    canonical_form, gram_of, subdiagram_prefilter, visual_subgroup, CoxeterDiagram, DynkinDiagram,
    EdgeMark, Normalization, PrefilterResult, VisualVertex,
};
use crate::diophantine::{anchored_systems, find_obstruction, search_witness, DiophSystem, Obstruction, Witness};
use crate::lorentz::{sqrt_rational, unit_basis, Realization};
use crate::roots::{is_root, RootKind, RootSystemSpec};
use crate::scalars::{bilinear, FieldScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    EqualRank,
    Visual,
    SearchFound,
    CertificateImported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeStatus {
    Exists,
    NotExists,
    Inconclusive,
}

/// What a `not-exists` edge rules out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    AllEmbeddings,
    /// Only embeddings that are maximal (no intermediate group).
    MaximalEmbeddings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructedSystem {
    pub system: DiophSystem,
    pub obstruction: Obstruction,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Evidence {
    Identity {
        certificate: EmbeddingCertificate,
    },
    /// Generators of a visual subgroup of G (`shrink` is `None` for a
    /// standard parabolic subgroup).
    Visual {
        shrink: Option<(usize, usize)>,
        vertices: Vec<VisualVertex>,
        certificate: EmbeddingCertificate,
    },
    Search {
        report: SearchReport,
    },
    /// Every anchored system for the given missing vertex is obstructed.
    DiophantineObstruction {
        variant: DynkinDiagram,
        missing: usize,
        systems: Vec<ObstructedSystem>,
    },
    DiophantineWitness {
        system: DiophSystem,
        witness: Witness,
        certificate: EmbeddingCertificate,
    },
    Prefilter {
        result: PrefilterResult,
    },
    /// Chain of exists edges H = path[0] ⊂ path[1] ⊂ ... ⊂ G, with the
    /// composed certificate when its scalars stay in the field.
    Composed {
        path: Vec<String>,
        certificate: Option<EmbeddingCertificate>,
    },
    /// Two reflections of G whose mirrors are parallel or divergent.
    RankTwo {
        ambient: CoxeterDiagram,
        roots: Vec<Vec<FieldScalar>>,
    },
    Imported {
        certificate: EmbeddingCertificate,
    },
    Unresolved {
        notes: Vec<String>,
    },
}

impl Evidence {
    /// SHA-256 of the JSON encoding; the pointer stored in edges.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("evidence serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEdge {
    pub sub: String,
    pub sup: String,
    pub kind: EdgeKind,
    pub status: EdgeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<Scope>,
    /// Hash of the evidence document.
    pub evidence: String,
    /// For exists edges after closure: no strictly intermediate exists
    /// path in the recorded lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximal_in_recorded_lattice: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct PairResult {
    pub edge: LatticeEdge,
    pub evidence: Evidence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Auto,
    Visual,
    Search,
    Diophantine,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Lattice {
    pub entries: Vec<CatalogEntry>,
    pub edges: Vec<LatticeEdge>,
    #[serde(skip)]
    pub evidence: BTreeMap<String, Evidence>,
}

impl Lattice {
    pub fn from_catalog(c: &Catalog) -> Self {
        Lattice { entries: c.entries().cloned().collect(), edges: Vec::new(), evidence: BTreeMap::new() }
    }

    pub fn entry(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn edge(&self, sub: &str, sup: &str) -> Option<&LatticeEdge> {
        self.edges.iter().find(|e| e.sub == sub && e.sup == sup)
    }

    /// Add or replace the edge for a pair, keeping edges sorted.
    pub fn record(&mut self, r: PairResult) {
        self.evidence.insert(r.edge.evidence.clone(), r.evidence);
        self.edges.retain(|e| !(e.sub == r.edge.sub && e.sup == r.edge.sup));
        self.edges.push(r.edge);
        self.sort();
    }

    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| a.id.cmp(&b.id));
        self.edges.sort_by(|a, b| (&a.sub, &a.sup).cmp(&(&b.sub, &b.sup)));
    }
}

fn kind_for(h: &CatalogEntry, g: &CatalogEntry, ev: &Evidence) -> EdgeKind {
    match ev {
        Evidence::Composed { .. } | Evidence::RankTwo { .. } | Evidence::Imported { .. } => EdgeKind::CertificateImported,
        Evidence::Visual { .. } => EdgeKind::Visual,
        _ if h.rank() == g.rank() => EdgeKind::EqualRank,
        _ => EdgeKind::SearchFound,
    }
}

fn make_result(
    h: &CatalogEntry,
    g: &CatalogEntry,
    status: EdgeStatus,
    scope: Option<Scope>,
    evidence: Evidence,
    note: Option<String>,
) -> PairResult {
    let edge = LatticeEdge {
        sub: h.id.clone(),
        sup: g.id.clone(),
        kind: kind_for(h, g, &evidence),
        status,
        scope,
        evidence: evidence.hash(),
        maximal_in_recorded_lattice: None,
        note,
    };
    PairResult { edge, evidence }
}

fn is_rank_two(e: &CatalogEntry) -> bool {
    e.rank() == 2 && e.diagram.label(0, 1).is_infinite()
}

fn identity_certificate(g: &CoxeterDiagram) -> EmbeddingCertificate {
    let n = g.rank();
    EmbeddingCertificate {
        ambient: g.clone(),
        ambient_norms: None,
        target: g.clone(),
        roots: (0..n).map(|i| unit_basis(n, i)).collect(),
    }
}

/// Subsets of `0..n` of size k containing `must` (if any), in
/// lexicographic order.
fn subsets(n: usize, k: usize, must: Option<usize>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, must: Option<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            if must.is_none_or(|m| cur.contains(&m)) {
                out.push(cur.clone());
            }
            return;
        }
        for v in start..n {
            cur.push(v);
            go(v + 1, n, k, must, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, must, &mut cur, &mut out);
    out
}

/// A visual subgroup or standard parabolic subgroup of G isomorphic to H.
pub fn find_visual(h: &CoxeterDiagram, g: &CoxeterDiagram) -> Option<Evidence> {
    let k = h.rank();
    let n = g.rank();
    if k >= n {
        return None;
    }
    let ch = canonical_form(h, None);
    let cert_for = |gens: &[Vec<FieldScalar>], sub: &CoxeterDiagram| -> Option<EmbeddingCertificate> {
        let cs = canonical_form(sub, None);
        if cs.code != ch.code {
            return None;
        }
        let mut roots = vec![Vec::new(); k];
        for a in 0..k {
            roots[ch.perm[a]] = gens[cs.perm[a]].clone();
        }
        Some(EmbeddingCertificate { ambient: g.clone(), ambient_norms: None, target: h.clone(), roots })
    };
    // standard parabolic subgroups
    for s in subsets(n, k, None) {
        let sub = g.subdiagram(&s);
        let gens: Vec<Vec<FieldScalar>> = s.iter().map(|&v| unit_basis(n, v)).collect();
        if let Some(certificate) = cert_for(&gens, &sub) {
            let vertices = s.iter().map(|&v| VisualVertex::Original(v)).collect();
            return Some(Evidence::Visual { shrink: None, vertices, certificate });
        }
    }
    for (i, j, _) in g.edges() {
        for (a, b) in [(i, j), (j, i)] {
            let Some(vs) = visual_subgroup(g, (a, b), None) else { continue };
            // vertex 0 of the full visual subgroup is the new generator
            for s in subsets(vs.vertices.len(), k, Some(0)) {
                let clean = s.iter().all(|&x| {
                    s.iter().all(|&y| x == y || matches!(vs.marks[x][y], Some(EdgeMark::Label(_))))
                });
                if !clean {
                    continue;
                }
                let sub = vs.diagram.subdiagram(&s);
                let gens: Vec<Vec<FieldScalar>> = s.iter().map(|&x| vs.generators[x].clone()).collect();
                if let Some(certificate) = cert_for(&gens, &sub) {
                    let vertices = s.iter().map(|&x| vs.vertices[x]).collect();
                    return Some(Evidence::Visual { shrink: Some((a, b)), vertices, certificate });
                }
            }
        }
    }
    None
}

/// Two reflections of G generating an infinite dihedral group: a bold
/// edge if there is one, otherwise the first reflected simple normal (in
/// breadth-first order) whose mirror misses a simple mirror.
pub fn rank_two_pair(g: &CoxeterDiagram, limit: usize) -> Option<Evidence> {
    let n = g.rank();
    if let Some((i, j, _)) = g.edges().into_iter().find(|e| e.2.is_infinite()) {
        return Some(Evidence::RankTwo { ambient: g.clone(), roots: vec![unit_basis(n, i), unit_basis(n, j)] });
    }
    let b = gram_of(g, &Normalization::Unit);
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let key = |v: &[FieldScalar]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut queue: Vec<Vec<FieldScalar>> = (0..n).map(|i| unit_basis(n, i)).collect();
    for v in &queue {
        seen.insert(key(v));
    }
    let mut idx = 0;
    while idx < queue.len() && queue.len() < limit {
        let x = queue[idx].clone();
        idx += 1;
        for k in 0..n {
            let e = unit_basis(n, k);
            let c = bilinear(&b, &x, &e) * FieldScalar::from_integer(2);
            let y: Vec<FieldScalar> = x.iter().zip(&e).map(|(a, ek)| a - &(&c * ek)).collect();
            if !seen.insert(key(&y)) {
                continue;
            }
            let neg: Vec<FieldScalar> = y.iter().map(|t| -t).collect();
            for i in 0..n {
                let ei = unit_basis(n, i);
                if y == ei || neg == ei {
                    continue;
                }
                let p = bilinear(&b, &ei, &y);
                if (&p * &p - FieldScalar::one()).sign() != crate::scalars::Sign::Negative {
                    let other = if p.is_positive() { neg.clone() } else { y.clone() };
                    return Some(Evidence::RankTwo { ambient: g.clone(), roots: vec![ei, other] });
                }
            }
            seen.insert(key(&neg));
            queue.push(y);
        }
    }
    None
}

fn check_rank_two(ambient: &CoxeterDiagram, roots: &[Vec<FieldScalar>]) -> Result<(), String> {
    let n = ambient.rank();
    if roots.len() != 2 || roots.iter().any(|r| r.len() != n) {
        return Err("rank-two evidence needs two roots of ambient dimension".into());
    }
    let b = gram_of(ambient, &Normalization::Unit);
    let (x, y) = (&roots[0], &roots[1]);
    let (xx, yy, xy) = (bilinear(&b, x, x), bilinear(&b, y, y), bilinear(&b, x, y));
    if !xx.is_positive() || !yy.is_positive() {
        return Err("root is not spacelike".into());
    }
    if !xy.is_negative() || (&xy * &xy - &xx * &yy).is_negative() {
        return Err("mirrors intersect".into());
    }
    let independent = (0..n).any(|i| (0..n).any(|j| !(&x[i] * &y[j] - &x[j] * &y[i]).is_zero()));
    if !independent {
        return Err("the two roots define the same mirror".into());
    }
    Ok(())
}

/// Express H ⊂ K ⊂ G directly: substitute K's simple normals, rescaled to
/// K's normalization, by their images in G.
pub fn compose_certificates(hk: &EmbeddingCertificate, kg: &EmbeddingCertificate) -> Option<EmbeddingCertificate> {
    if hk.ambient != kg.target {
        return None;
    }
    let g_real = Realization::new(&kg.ambient, kg.ambient_norms.as_deref()).ok()?;
    let k = hk.ambient.rank();
    let mut images = Vec::with_capacity(k);
    for (i, c) in kg.roots.iter().enumerate() {
        let q = hk.ambient_norms.as_ref().map_or(1, |v| v[i]);
        let cc = g_real.inner(c, c).to_rational()?;
        let s = sqrt_rational(&(num_rational::BigRational::from_integer(q.into()) / cc))?;
        images.push(c.iter().map(|x| x * &s).collect::<Vec<FieldScalar>>());
    }
    let n = kg.ambient.rank();
    let roots = hk
        .roots
        .iter()
        .map(|x| {
            (0..n)
                .map(|t| x.iter().zip(&images).fold(FieldScalar::zero(), |acc, (a, img)| acc + a * &img[t]))
                .collect()
        })
        .collect();
    let c = EmbeddingCertificate {
        ambient: kg.ambient.clone(),
        ambient_norms: kg.ambient_norms.clone(),
        target: hk.target.clone(),
        roots,
    };
    c.verify().ok().map(|_| c)
}

fn check_certificate(c: &EmbeddingCertificate, h: &CoxeterDiagram, g: &CoxeterDiagram) -> Result<(), String> {
    if c.ambient != *g {
        return Err("certificate ambient is not G".into());
    }
    if c.target != *h {
        return Err("certificate target is not H".into());
    }
    c.verify().map_err(|e| e.to_string())
}

/// Re-verify evidence for the pair (H, G). `full` reruns chamber searches
/// for not-found reports; otherwise only the stored witnesses are checked.
/// Composed evidence is checked here only through its certificate; the
/// links are checked by [`verify_lattice`].
pub fn verify_evidence(ev: &Evidence, h: &CoxeterDiagram, g: &CoxeterDiagram, full: bool) -> Result<EdgeStatus, String> {
    match ev {
        Evidence::Identity { certificate } | Evidence::Imported { certificate } | Evidence::Visual { certificate, .. } => {
            check_certificate(certificate, h, g).map(|_| EdgeStatus::Exists)
        }
        Evidence::DiophantineWitness { system, witness, certificate } => {
            if system.ambient.base != *g || !system.satisfied_by(&witness.coefficients) {
                return Err("witness does not solve the system".into());
            }
            let spec = RootSystemSpec::new(system.ambient.clone());
            if is_root(&spec, &witness.coefficients).map_err(|e| e.to_string())? != RootKind::Real {
                return Err("witness is not a real root".into());
            }
            check_certificate(certificate, h, g).map(|_| EdgeStatus::Exists)
        }
        Evidence::Search { report } => {
            if report.h != *h || report.g != *g {
                return Err("report is for a different pair".into());
            }
            match report.verdict {
                Verdict::Found => {
                    let c = report.certificates.first().ok_or("found report without certificate")?;
                    check_certificate(c, h, g).map(|_| EdgeStatus::Exists)
                }
                Verdict::NotFound => {
                    if full {
                        replay_not_found(report)?;
                    } else {
                        check_not_found_witnesses(report)?;
                    }
                    Ok(EdgeStatus::NotExists)
                }
                _ => Ok(EdgeStatus::Inconclusive),
            }
        }
        Evidence::DiophantineObstruction { variant, missing, systems } => {
            if variant.base != *g || DynkinDiagram::new(variant.base.clone(), variant.norms.clone()).is_err() {
                return Err("variant is not a root system for G".into());
            }
            let expected = anchored_systems(variant, h, *missing);
            if expected.len() != systems.len() || expected.iter().zip(systems).any(|(a, b)| *a != b.system) {
                return Err("stored systems do not cover every anchor".into());
            }
            if systems.iter().all(|s| s.obstruction.replay(&s.system)) {
                Ok(if finite_maximal_parabolics(h).contains(missing) {
                    EdgeStatus::NotExists
                } else {
                    EdgeStatus::Inconclusive
                })
            } else {
                Err("an obstruction does not replay".into())
            }
        }
        Evidence::Prefilter { result } => {
            let again = subdiagram_prefilter(g, h);
            if again != *result || again.passed() {
                return Err("prefilter result does not replay".into());
            }
            Ok(EdgeStatus::NotExists)
        }
        Evidence::Composed { certificate, .. } => match certificate {
            Some(c) => check_certificate(c, h, g).map(|_| EdgeStatus::Exists),
            None => Ok(EdgeStatus::Exists),
        },
        Evidence::RankTwo { ambient, roots } => {
            if ambient != g || h.rank() != 2 || !h.label(0, 1).is_infinite() {
                return Err("rank-two evidence for a different pair".into());
            }
            check_rank_two(ambient, roots).map(|_| EdgeStatus::Exists)
        }
        Evidence::Unresolved { .. } => Ok(EdgeStatus::Inconclusive),
    }
}

fn search_options(cfg: &Config) -> SearchOptions {
    SearchOptions { max_chambers: cfg.max_chambers, ..SearchOptions::default() }
}

/// Outcome of the Diophantine step for one missing vertex.
enum DiophOutcome {
    Exists(Evidence),
    Obstructed(Evidence),
    Open(String),
}

fn diophantine_step(h: &CoxeterDiagram, g: &CoxeterDiagram, variant: &DynkinDiagram, missing: usize, cfg: &Config) -> DiophOutcome {
    let systems = anchored_systems(variant, h, missing);
    if systems.is_empty() {
        return DiophOutcome::Open(format!("no anchor for missing vertex {missing}"));
    }
    let mut obstructed = Vec::new();
    let mut open = 0;
    for sys in systems {
        match find_obstruction(&sys, &cfg.moduli) {
            Some(obstruction) => obstructed.push(ObstructedSystem { system: sys, obstruction }),
            None => {
                let free = sys.unknowns().saturating_sub(sys.rows.len());
                let ws = search_witness(&sys, cfg.witness_bound_for(free));
                if let Some(w) = ws.witness.filter(|w| w.root == RootKind::Real) {
                    let mut roots = vec![Vec::new(); h.rank()];
                    for (r, &hv) in sys.anchor.roots.iter().zip(&sys.anchor.h_vertices) {
                        roots[hv] = r.iter().map(|&x| FieldScalar::from_integer(x)).collect();
                    }
                    roots[missing] = w.coefficients.iter().map(|&x| FieldScalar::from_integer(x)).collect();
                    let certificate = EmbeddingCertificate {
                        ambient: g.clone(),
                        ambient_norms: Some(variant.norms.clone()),
                        target: h.clone(),
                        roots,
                    };
                    if certificate.verify().is_ok() {
                        return DiophOutcome::Exists(Evidence::DiophantineWitness { system: sys, witness: w, certificate });
                    }
                }
                open += 1;
            }
        }
    }
    if open == 0 {
        DiophOutcome::Obstructed(Evidence::DiophantineObstruction { variant: variant.clone(), missing, systems: obstructed })
    } else {
        DiophOutcome::Open(format!("{open} anchored system(s) without obstruction or real-root witness"))
    }
}

/// Decide H ⊂ G for two catalog entries: prefilter, visual subgroups,
/// chamber search, then Diophantine obstructions for crystallographic G.
pub fn run_pair(catalog: &Catalog, h_id: &str, g_id: &str, strategy: Strategy, cfg: &Config) -> Result<PairResult, CatalogError> {
    let he = catalog.resolve(h_id)?;
    let ge = catalog.resolve(g_id)?;
    Ok(run_entries(he, ge, strategy, cfg))
}

pub fn run_entries(he: &CatalogEntry, ge: &CatalogEntry, strategy: Strategy, cfg: &Config) -> PairResult {
    let (h, g) = (&he.diagram, &ge.diagram);
    let unresolved = |notes: Vec<String>| {
        make_result(he, ge, EdgeStatus::Inconclusive, None, Evidence::Unresolved { notes }, None)
    };
    let auto = strategy == Strategy::Auto;
    if he.rank() > ge.rank() {
        return unresolved(vec!["rank of H exceeds rank of G".into()]);
    }
    if he.id == ge.id {
        let ev = Evidence::Identity { certificate: identity_certificate(g) };
        return make_result(he, ge, EdgeStatus::Exists, None, ev, None);
    }
    if is_rank_two(he) {
        return match rank_two_pair(g, 20_000) {
            Some(ev) => make_result(he, ge, EdgeStatus::Exists, None, ev, None),
            None => unresolved(vec!["no divergent or parallel mirror pair found".into()]),
        };
    }
    let mut notes = Vec::new();
    let h_simplex = he.class.is_hyperbolic_simplicial();
    let g_simplex = ge.class.is_hyperbolic_simplicial();
    if !h_simplex {
        return unresolved(vec!["H is not a hyperbolic simplex group".into()]);
    }
    let prefilter = (g_simplex && he.rank() == ge.rank()).then(|| subdiagram_prefilter(g, h));
    if let Some(PrefilterResult::IdealInCompact { .. }) = &prefilter {
        let ev = Evidence::Prefilter { result: prefilter.clone().unwrap() };
        return make_result(he, ge, EdgeStatus::NotExists, Some(Scope::AllEmbeddings), ev, None);
    }
    if (auto || strategy == Strategy::Visual) && g_simplex {
        if let Some(ev) = find_visual(h, g) {
            return make_result(he, ge, EdgeStatus::Exists, None, ev, None);
        }
        notes.push("no visual subgroup of G is isomorphic to H".into());
    }
    if auto {
        if let Some(p) = prefilter.as_ref().filter(|p| !p.passed()) {
            let ev = Evidence::Prefilter { result: p.clone() };
            let note = "a vertex link of H is not a subdiagram of G; no maximal embedding".to_string();
            return make_result(he, ge, EdgeStatus::NotExists, Some(Scope::MaximalEmbeddings), ev, Some(note));
        }
    }
    let mut missing_hint = None;
    if (auto || strategy == Strategy::Search) && g_simplex {
        match search_embedding(h, g, &search_options(cfg)) {
            Ok(report) => {
                missing_hint = report.missing_vertex;
                match report.verdict {
                    Verdict::Found => return make_result(he, ge, EdgeStatus::Exists, None, Evidence::Search { report }, None),
                    Verdict::NotFound => {
                        let scope = if he.rank() == ge.rank() { Scope::AllEmbeddings } else { Scope::MaximalEmbeddings };
                        let note = report.note.clone();
                        return make_result(he, ge, EdgeStatus::NotExists, Some(scope), Evidence::Search { report }, note);
                    }
                    Verdict::Inapplicable => notes.push("chamber search inapplicable: H has no finite vertex".into()),
                    Verdict::Inconclusive => notes.push(format!(
                        "chamber search inconclusive after {} chambers",
                        report.stats.chambers_expanded
                    )),
                }
            }
            Err(e) => notes.push(format!("chamber search: {e}")),
        }
    }
    if (auto || strategy == Strategy::Diophantine) && he.rank() < ge.rank() {
        match ge.variants.first() {
            None => notes.push("G is not crystallographic; no Diophantine step".into()),
            Some(variant) => {
                let finite = finite_maximal_parabolics(h);
                let candidates: Vec<usize> = match missing_hint {
                    Some(j) => vec![j],
                    None if !finite.is_empty() => {
                        finite.iter().copied().filter(|&j| !enumerate_anchors(h, g, j).is_empty()).take(1).collect()
                    }
                    None => (0..h.rank()).collect(),
                };
                let mut obstructed = None;
                for j in candidates {
                    match diophantine_step(h, g, variant, j, cfg) {
                        DiophOutcome::Exists(ev) => return make_result(he, ge, EdgeStatus::Exists, None, ev, None),
                        DiophOutcome::Obstructed(ev) => {
                            if finite.contains(&j) {
                                return make_result(he, ge, EdgeStatus::NotExists, Some(Scope::MaximalEmbeddings), ev, None);
                            }
                            obstructed.get_or_insert(ev);
                        }
                        DiophOutcome::Open(s) => notes.push(format!("Diophantine, missing vertex {j}: {s}")),
                    }
                }
                if let Some(ev) = obstructed {
                    let note = "obstructed for every standard anchor of an affine H₁; anchors off the simple roots are not covered";
                    return make_result(he, ge, EdgeStatus::Inconclusive, None, ev, Some(note.into()));
                }
            }
        }
    }
    unresolved(notes)
}

/// Run every pair of catalog entries with 3 ≤ rk H ≤ rk G ≤ max_rank
/// (skipping pairs already decided in `lattice`), in a worker pool.
pub fn build_lattice(catalog: &Catalog, cfg: &Config, lattice: &mut Lattice) {
    let mut known: BTreeSet<String> = lattice.entries.iter().map(|e| e.id.clone()).collect();
    for e in catalog.entries() {
        if known.insert(e.id.clone()) {
            lattice.entries.push(e.clone());
        }
    }
    let entries: Vec<&CatalogEntry> = catalog.entries().filter(|e| e.rank() <= cfg.max_rank).collect();
    let mut jobs = Vec::new();
    for h in &entries {
        for g in &entries {
            if h.id == g.id || h.rank() < 3 || h.rank() > g.rank() {
                continue;
            }
            if lattice.edge(&h.id, &g.id).is_some_and(|e| e.status != EdgeStatus::Inconclusive) {
                continue;
            }
            jobs.push((*h, *g));
        }
    }
    let cfg = &Config { max_chambers: cfg.lattice_max_chambers, ..cfg.clone() };
    let run = || jobs.par_iter().map(|(h, g)| run_entries(h, g, Strategy::Auto, cfg)).collect::<Vec<_>>();
    let results = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    for r in results {
        lattice.record(r);
    }
    closure(lattice);
}

fn composed_path(lattice: &Lattice, e: &LatticeEdge) -> Vec<String> {
    match lattice.evidence.get(&e.evidence) {
        Some(Evidence::Composed { path, .. }) => path.clone(),
        _ => vec![e.sub.clone(), e.sup.clone()],
    }
}

fn edge_certificate(lattice: &Lattice, e: &LatticeEdge) -> Option<EmbeddingCertificate> {
    match lattice.evidence.get(&e.evidence)? {
        Evidence::Identity { certificate }
        | Evidence::Imported { certificate }
        | Evidence::Visual { certificate, .. }
        | Evidence::DiophantineWitness { certificate, .. } => Some(certificate.clone()),
        Evidence::Search { report } => report.certificates.first().cloned(),
        Evidence::Composed { certificate, .. } => certificate.clone(),
        _ => None,
    }
}

/// Rank-2 edges, transitive closure of exists edges with composition
/// provenance, and the maximal-in-recorded-lattice labels. Idempotent.
pub fn closure(lattice: &mut Lattice) {
    lattice.sort();
    let entries = lattice.entries.clone();
    if let Some(two) = entries.iter().find(|e| is_rank_two(e)) {
        for g in entries.iter().filter(|g| g.rank() >= 3) {
            if lattice.edge(&two.id, &g.id).is_some_and(|e| e.status == EdgeStatus::Exists) {
                continue;
            }
            if let Some(ev) = rank_two_pair(&g.diagram, 20_000) {
                lattice.record(make_result(two, g, EdgeStatus::Exists, None, ev, None));
            }
        }
    }
    loop {
        let exists: BTreeMap<(String, String), LatticeEdge> = lattice
            .edges
            .iter()
            .filter(|e| e.status == EdgeStatus::Exists && e.sub != e.sup)
            .map(|e| ((e.sub.clone(), e.sup.clone()), e.clone()))
            .collect();
        let mut added = Vec::new();
        let mut claimed: BTreeSet<(String, String)> = BTreeSet::new();
        for ((a, b), ab) in &exists {
            for ((_, c), bc) in exists.range((b.clone(), String::new())..).take_while(|((x, _), _)| x == b) {
                if a == c || exists.contains_key(&(a.clone(), c.clone())) || !claimed.insert((a.clone(), c.clone())) {
                    continue;
                }
                let (Some(he), Some(ge)) = (lattice.entry(a), lattice.entry(c)) else { continue };
                let mut path = composed_path(lattice, ab);
                path.extend(composed_path(lattice, bc).into_iter().skip(1));
                let certificate = match (edge_certificate(lattice, ab), edge_certificate(lattice, bc)) {
                    (Some(x), Some(y)) => compose_certificates(&x, &y),
                    _ => None,
                };
                let ev = Evidence::Composed { path, certificate };
                let mut r = make_result(he, ge, EdgeStatus::Exists, None, ev, None);
                match lattice.edge(a, c) {
                    Some(old) if old.status == EdgeStatus::NotExists && old.scope == Some(Scope::AllEmbeddings) => {
                        let mut old = old.clone();
                        old.status = EdgeStatus::Inconclusive;
                        old.note = Some("conflict: a composed exists path contradicts this negative".into());
                        added.push(PairResult { evidence: lattice.evidence[&old.evidence].clone(), edge: old });
                        continue;
                    }
                    Some(old) if old.status == EdgeStatus::NotExists => {
                        r.edge.note = Some("not maximal: no maximal embedding, but a chain of embeddings exists".into());
                    }
                    _ => {}
                }
                added.push(r);
            }
        }
        let changed = added.iter().any(|r| r.edge.status == EdgeStatus::Exists);
        for r in added {
            lattice.record(r);
        }
        if !changed {
            break;
        }
    }
    let exists: BTreeSet<(String, String)> = lattice
        .edges
        .iter()
        .filter(|e| e.status == EdgeStatus::Exists)
        .map(|e| (e.sub.clone(), e.sup.clone()))
        .collect();
    let ids: Vec<String> = lattice.entries.iter().map(|e| e.id.clone()).collect();
    for e in lattice.edges.iter_mut() {
        e.maximal_in_recorded_lattice = (e.status == EdgeStatus::Exists).then(|| {
            !ids.iter().any(|k| {
                *k != e.sub
                    && *k != e.sup
                    && exists.contains(&(e.sub.clone(), k.clone()))
                    && exists.contains(&(k.clone(), e.sup.clone()))
            })
        });
    }
}

/// Re-verify every edge. Failing evidence flags the edge `inconclusive`;
/// returns the (sub, sup, message) of every failure.
pub fn verify_lattice(lattice: &mut Lattice, full: bool) -> Vec<(String, String, String)> {
    let mut failures = Vec::new();
    let entries: BTreeMap<String, CoxeterDiagram> =
        lattice.entries.iter().map(|e| (e.id.clone(), e.diagram.clone())).collect();
    let checks: Vec<Result<EdgeStatus, String>> = lattice
        .edges
        .par_iter()
        .map(|e| {
            let ev = lattice.evidence.get(&e.evidence).ok_or("evidence missing")?;
            if ev.hash() != e.evidence {
                return Err("evidence hash mismatch".into());
            }
            let (h, g) = match (entries.get(&e.sub), entries.get(&e.sup)) {
                (Some(h), Some(g)) => (h, g),
                _ => return Err("edge refers to an unknown entry".into()),
            };
            verify_evidence(ev, h, g, full)
        })
        .collect();
    let exists: BTreeSet<(String, String)> = lattice
        .edges
        .iter()
        .zip(&checks)
        .filter(|(e, c)| e.status == EdgeStatus::Exists && c.as_ref().is_ok_and(|s| *s == EdgeStatus::Exists))
        .map(|(e, _)| (e.sub.clone(), e.sup.clone()))
        .collect();
    for (e, check) in lattice.edges.iter_mut().zip(checks) {
        let mut result = check.and_then(|s| {
            if s == e.status || e.status == EdgeStatus::Inconclusive {
                Ok(())
            } else {
                Err(format!("evidence supports {s:?}, edge claims {:?}", e.status))
            }
        });
        if result.is_ok() {
            if let Some(Evidence::Composed { path, .. }) = lattice.evidence.get(&e.evidence) {
                let ok = path.first() == Some(&e.sub)
                    && path.last() == Some(&e.sup)
                    && path.windows(2).all(|w| exists.contains(&(w[0].clone(), w[1].clone())));
                if !ok {
                    result = Err("a link of the composed path is not a verified exists edge".into());
                }
            }
        }
        if let Err(msg) = result {
            if e.status != EdgeStatus::Inconclusive {
                e.status = EdgeStatus::Inconclusive;
                e.note = Some(format!("evidence failed verification: {msg}"));
            }
            failures.push((e.sub.clone(), e.sup.clone(), msg));
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{named_diagram, triangle};

    fn small_catalog() -> Catalog {
        let mut c = Catalog::new();
        for name in ["(2,3,7)", "(3,3,7)", "(0,0,3)", "[3^{[3,3]}]", "[inf]", "[3^{1,1,1,1,1}]"] {
            c.insert(&named_diagram(name).unwrap(), &[name]).unwrap();
        }
        c
    }

    #[test]
    fn visual_pair() {
        let mut c = Catalog::new();
        c.insert(&named_diagram("[3^{[3,3]}]").unwrap(), &["g"]).unwrap();
        c.insert(&triangle(0, 0, 3).unwrap(), &["h"]).unwrap();
        let r = run_pair(&c, "h", "g", Strategy::Auto, &Config::default()).unwrap();
        assert_eq!(r.edge.status, EdgeStatus::Exists);
        assert_eq!(r.edge.kind, EdgeKind::Visual);
        let (h, g) = (&c.resolve("h").unwrap().diagram, &c.resolve("g").unwrap().diagram);
        assert_eq!(verify_evidence(&r.evidence, h, g, true), Ok(EdgeStatus::Exists));
    }

    #[test]
    fn heptagonal_pair_not_exists() {
        let c = small_catalog();
        let r = run_pair(&c, "(3,3,7)", "(2,3,7)", Strategy::Auto, &Config::default()).unwrap();
        assert_eq!(r.edge.status, EdgeStatus::NotExists);
        assert_eq!(r.edge.kind, EdgeKind::EqualRank);
        let (h, g) = (&c.resolve("(3,3,7)").unwrap().diagram, &c.resolve("(2,3,7)").unwrap().diagram);
        assert_eq!(verify_evidence(&r.evidence, h, g, true), Ok(EdgeStatus::NotExists));
    }

    #[test]
    fn tetrahedron_pair_via_diophantine() {
        let c = small_catalog();
        let cfg = Config { max_chambers: 20_000, ..Config::default() };
        let r = run_pair(&c, "(0,0,3)", "[3^{1,1,1,1,1}]", Strategy::Auto, &cfg).unwrap();
        assert_eq!(r.edge.status, EdgeStatus::NotExists);
        assert!(matches!(r.evidence, Evidence::DiophantineObstruction { .. }));
    }

    #[test]
    fn rank_two_everywhere() {
        let g = triangle(2, 3, 7).unwrap();
        let ev = rank_two_pair(&g, 20_000).unwrap();
        let h = named_diagram("[inf]").unwrap();
        assert_eq!(verify_evidence(&ev, &h, &g, false), Ok(EdgeStatus::Exists));
    }

    #[test]
    fn closure_composes_and_is_idempotent() {
        let mut c = Catalog::new();
        for name in ["(0,0,3)", "[3^{[3,3]}]", "[inf]"] {
            c.insert(&named_diagram(name).unwrap(), &[name]).unwrap();
        }
        let mut l = Lattice::from_catalog(&c);
        let cfg = Config::default();
        let r = run_pair(&c, "(0,0,3)", "[3^{[3,3]}]", Strategy::Auto, &cfg).unwrap();
        l.record(r);
        closure(&mut l);
        let two = c.resolve("[inf]").unwrap().id.clone();
        let tet = c.resolve("[3^{[3,3]}]").unwrap().id.clone();
        let e = l.edge(&two, &tet).unwrap();
        assert_eq!(e.status, EdgeStatus::Exists);
        let before = serde_json::to_string(&l).unwrap();
        closure(&mut l);
        assert_eq!(before, serde_json::to_string(&l).unwrap());
        assert!(verify_lattice(&mut l, false).is_empty());
    }
}
