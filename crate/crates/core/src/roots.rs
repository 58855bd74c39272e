//! Real and imaginary roots of crystallographic hyperbolic root systems,
//! root-subsystem certificates, and the short/long reflection subgroups.

use std::collections::HashSet;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chamber_search::EmbeddingCertificate;
use crate::diagrams::{
    classify, component_type, components, crystallographic_variants, ComponentKind, CoxeterDiagram, DiagramError,
    DynkinDiagram, EdgeMark, Label,
};
use crate::lorentz::Realization;
use crate::scalars::FieldScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("vector has {got} coordinates, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("candidate {0} is not a real root")]
    NonRoot(usize),
    #[error("products of candidates {0} and {1} do not form a generalized Cartan matrix")]
    NotCartan(usize, usize),
    #[error("{0}")]
    Lift(String),
    #[error("tower links {0} and {1} do not share a root system")]
    JointMismatch(usize, usize),
    #[error("empty tower")]
    EmptyTower,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A crystallographic root system given by a Dynkin diagram: simple roots
/// α_i with (α_i, α_i) = q_i and integer symmetrized form B.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystemSpec {
    pub dynkin: DynkinDiagram,
    pub gram: Vec<Vec<i64>>,
}

impl RootSystemSpec {
    pub fn new(dynkin: DynkinDiagram) -> Self {
        let gram = dynkin
            .gram_integers()
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().expect("small Gram entry")).collect())
            .collect();
        RootSystemSpec { dynkin, gram }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn cartan(&self) -> Vec<Vec<i64>> {
        self.dynkin.cartan()
    }

    /// Symmetrizable of indefinite type with all proper principal
    /// submatrices of finite or affine type.
    pub fn is_hyperbolic_type(&self) -> bool {
        classify(&self.dynkin.base).is_hyperbolic_simplicial()
    }

    pub fn inner(&self, a: &[i64], b: &[i64]) -> i128 {
        let mut s = 0i128;
        for (i, row) in self.gram.iter().enumerate() {
            if a[i] == 0 {
                continue;
            }
            let t: i128 = row.iter().zip(b).map(|(x, y)| *x as i128 * *y as i128).sum();
            s += a[i] as i128 * t;
        }
        s
    }

    fn check_dim(&self, a: &[i64]) -> Result<(), RootError> {
        if a.len() == self.rank() {
            Ok(())
        } else {
            Err(RootError::Dimension { expected: self.rank(), got: a.len() })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootKind {
    Real,
    Imaginary,
    NotARoot,
}

/// Root membership by descent: reflect a positive vector in simple roots
/// while that lowers its height. Real roots end at a simple root; positive
/// imaginary roots end in the cone {(α, α_i) ≤ 0 ∀i} with connected support.
pub fn is_root(spec: &RootSystemSpec, alpha: &[i64]) -> Result<RootKind, RootError> {
    spec.check_dim(alpha)?;
    let n = spec.rank();
    if alpha.iter().all(|&a| a == 0) {
        return Ok(RootKind::NotARoot);
    }
    let positive = alpha.iter().all(|&a| a >= 0);
    if !positive && !alpha.iter().all(|&a| a <= 0) {
        return Ok(RootKind::NotARoot);
    }
    let mut x: Vec<i128> = alpha.iter().map(|&a| if positive { a as i128 } else { -(a as i128) }).collect();
    loop {
        let support: Vec<usize> = (0..n).filter(|&i| x[i] != 0).collect();
        if support.len() == 1 && x[support[0]] == 1 {
            return Ok(RootKind::Real);
        }
        let bx: Vec<i128> = (0..n)
            .map(|i| spec.gram[i].iter().zip(&x).map(|(g, c)| *g as i128 * c).sum())
            .collect();
        match (0..n).find(|&i| bx[i] > 0) {
            Some(i) => {
                let q = spec.gram[i][i] as i128;
                if (2 * bx[i]) % q != 0 {
                    return Ok(RootKind::NotARoot);
                }
                x[i] -= 2 * bx[i] / q;
                if x[i] < 0 {
                    return Ok(RootKind::NotARoot);
                }
            }
            None => {
                let sub = spec.dynkin.base.subdiagram(&support);
                return Ok(if sub.is_connected() { RootKind::Imaginary } else { RootKind::NotARoot });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceCheck {
    pub i: usize,
    pub j: usize,
    pub difference: Vec<i64>,
    pub kind: RootKind,
}

/// β_1..β_k are simple roots of a root subsystem of Δ_G.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemCertificate {
    pub ambient: RootSystemSpec,
    pub roots: Vec<Vec<i64>>,
    /// Generalized Cartan matrix 2(β_i, β_j)/(β_i, β_i).
    pub cartan: Vec<Vec<i64>>,
    /// Squared lengths (β_i, β_i).
    pub norms: Vec<i64>,
    pub hyperbolic: bool,
    pub checks: Vec<DifferenceCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum SubsystemOutcome {
    Certified(SubsystemCertificate),
    /// β_i − β_j is a root of Δ_G.
    DifferenceIsRoot { i: usize, j: usize, difference: Vec<i64>, kind: RootKind },
}

impl SubsystemOutcome {
    pub fn certificate(&self) -> Option<&SubsystemCertificate> {
        match self {
            SubsystemOutcome::Certified(c) => Some(c),
            _ => None,
        }
    }
}

fn label_from_cartan(a: i64, b: i64) -> Option<Label> {
    match a * b {
        0 => Some(Label::TWO),
        1 => Label::finite(3).ok(),
        2 => Label::finite(4).ok(),
        3 => Label::finite(6).ok(),
        4 => Some(Label::INF),
        _ => None,
    }
}

/// The Coxeter diagram of a generalized Cartan matrix, if every product
/// A_ij A_ji is at most 4.
pub fn diagram_of_cartan(a: &[Vec<i64>]) -> Option<CoxeterDiagram> {
    let n = a.len();
    let mut d = CoxeterDiagram::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            d.set(i, j, label_from_cartan(a[i][j], a[j][i])?);
        }
    }
    Some(d)
}

/// Certify that β_1..β_k are simple roots of a root subsystem: every β_i is
/// a real root, the products form a generalized Cartan matrix, and no
/// difference β_i − β_j is a root.
pub fn check_subsystem(spec: &RootSystemSpec, betas: &[Vec<i64>]) -> Result<SubsystemOutcome, RootError> {
    for (i, b) in betas.iter().enumerate() {
        spec.check_dim(b)?;
        if is_root(spec, b)? != RootKind::Real {
            return Err(RootError::NonRoot(i));
        }
    }
    let k = betas.len();
    let norms: Vec<i64> = betas.iter().map(|b| spec.inner(b, b) as i64).collect();
    let mut cartan = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in 0..k {
            let p = 2 * spec.inner(&betas[i], &betas[j]);
            let q = norms[i] as i128;
            if p % q != 0 || (i != j && p > 0) {
                return Err(RootError::NotCartan(i.min(j), i.max(j)));
            }
            cartan[i][j] = (p / q) as i64;
        }
    }
    let mut checks = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let diff: Vec<i64> = betas[i].iter().zip(&betas[j]).map(|(a, b)| a - b).collect();
            let kind = is_root(spec, &diff)?;
            if kind != RootKind::NotARoot {
                return Ok(SubsystemOutcome::DifferenceIsRoot { i, j, difference: diff, kind });
            }
            checks.push(DifferenceCheck { i, j, difference: diff, kind });
        }
    }
    let hyperbolic = diagram_of_cartan(&cartan).is_some_and(|d| classify(&d).is_hyperbolic_simplicial());
    Ok(SubsystemOutcome::Certified(SubsystemCertificate {
        ambient: spec.clone(),
        roots: betas.to_vec(),
        cartan,
        norms,
        hyperbolic,
        checks,
    }))
}

impl SubsystemCertificate {
    /// Recompute every check from the stored roots.
    pub fn verify(&self) -> Result<(), RootError> {
        match check_subsystem(&self.ambient, &self.roots)? {
            SubsystemOutcome::Certified(c) if c == *self => Ok(()),
            SubsystemOutcome::Certified(_) => Err(RootError::Lift("stored certificate differs from recomputation".into())),
            SubsystemOutcome::DifferenceIsRoot { i, j, .. } => {
                Err(RootError::Lift(format!("difference of roots {i} and {j} is a root")))
            }
        }
    }
}

/// Primitive integer vector on the ray through x, if x is a rational
/// multiple of an integer vector.
fn primitive_integer(x: &[FieldScalar]) -> Option<Vec<i64>> {
    let pivot = x.iter().find(|a| !a.is_zero())?.clone();
    let ratios: Vec<num_rational::BigRational> =
        x.iter().map(|a| a.checked_div(&pivot).ok().and_then(|r| r.to_rational())).collect::<Option<_>>()?;
    let lcm = ratios.iter().fold(num_bigint::BigInt::from(1), |acc, r| num_integer::Integer::lcm(&acc, r.denom()));
    let ints: Vec<num_bigint::BigInt> = ratios.iter().map(|r| (r * &lcm).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::from(0), |acc, v| num_integer::Integer::gcd(&acc, v));
    let sign = if pivot.is_negative() { -1 } else { 1 };
    ints.iter().map(|v| (v / &g).to_i64().map(|t| t * sign)).collect()
}

/// Convert an embedding certificate to the root lattice of `g_variant` and
/// certify the resulting simple roots. With `h_variant`, the root norms must
/// match it up to a common factor.
pub fn lift_embedding(
    cert: &EmbeddingCertificate,
    g_variant: &DynkinDiagram,
    h_variant: Option<&DynkinDiagram>,
) -> Result<SubsystemOutcome, RootError> {
    if g_variant.base != cert.ambient {
        return Err(RootError::Lift("variant is for a different diagram".into()));
    }
    let n = g_variant.rank();
    let amb = Realization::new(&cert.ambient, cert.ambient_norms.as_deref())
        .map_err(|e| RootError::Lift(e.to_string()))?;
    let var = Realization::new(&cert.ambient, Some(&g_variant.norms)).map_err(|e| RootError::Lift(e.to_string()))?;
    // e_i(amb) = √(q_amb,i / q_var,i) e_i(var)
    let scale: Vec<FieldScalar> = (0..n)
        .map(|i| {
            let r = amb.gram[i][i].checked_div(&var.gram[i][i]).ok().and_then(|x| x.to_rational());
            r.and_then(|r| crate::lorentz::sqrt_rational(&r))
                .ok_or_else(|| RootError::Lift(format!("cannot rescale coordinate {i}")))
        })
        .collect::<Result<_, _>>()?;
    let spec = RootSystemSpec::new(g_variant.clone());
    let mut betas = Vec::new();
    for (k, x) in cert.roots.iter().enumerate() {
        let y: Vec<FieldScalar> = x.iter().zip(&scale).map(|(a, s)| a * s).collect();
        let mut b = primitive_integer(&y).ok_or(RootError::NonRoot(k))?;
        if is_root(&spec, &b)? != RootKind::Real {
            // a long root may be twice a primitive vector only in non-reduced
            // systems, which do not occur; try the doubled vector anyway
            let doubled: Vec<i64> = b.iter().map(|v| 2 * v).collect();
            if is_root(&spec, &doubled)? != RootKind::Real {
                return Err(RootError::NonRoot(k));
            }
            b = doubled;
        }
        betas.push(b);
    }
    if let Some(h) = h_variant {
        if h.base != cert.target {
            return Err(RootError::Lift("h variant is for a different diagram".into()));
        }
        let norms: Vec<i64> = betas.iter().map(|b| spec.inner(b, b) as i64).collect();
        let ok = (0..norms.len()).all(|i| norms[i] * h.norms[0] as i64 == norms[0] * h.norms[i] as i64);
        if !ok {
            return Err(RootError::Lift("root norms do not match the requested H variant".into()));
        }
    }
    check_subsystem(&spec, &betas)
}

/// Try every crystallographic variant of G; returns the outcomes in variant
/// order.
pub fn lift_all_variants(cert: &EmbeddingCertificate) -> Vec<(DynkinDiagram, Result<SubsystemOutcome, RootError>)> {
    crystallographic_variants(&cert.ambient)
        .into_iter()
        .map(|v| {
            let r = lift_embedding(cert, &v, None);
            (v, r)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerCertificate {
    pub links: Vec<SubsystemCertificate>,
    /// The bottom system's simple roots in the top ambient lattice.
    pub composite: SubsystemCertificate,
    /// Links whose ambient diagram admits more than one length assignment.
    pub choice_links: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Compose K_0 ⊂ K_1 ⊂ ... : link i certifies K_i in K_{i+1}. Joints must
/// agree: the ambient Cartan matrix of link i equals the subsystem Cartan
/// matrix of link i+1.
pub fn compose_towers(links: &[SubsystemCertificate]) -> Result<TowerCertificate, RootError> {
    let first = links.first().ok_or(RootError::EmptyTower)?;
    for w in 0..links.len().saturating_sub(1) {
        if links[w].ambient.cartan() != links[w + 1].cartan {
            return Err(RootError::JointMismatch(w, w + 1));
        }
    }
    // roots of K_0 in the lattice of K_{i+1}
    let mut cur = first.roots.clone();
    for link in &links[1..] {
        cur = cur
            .iter()
            .map(|c| {
                let mut out = vec![0i64; link.ambient.rank()];
                for (j, &cj) in c.iter().enumerate() {
                    for (o, b) in out.iter_mut().zip(&link.roots[j]) {
                        *o += cj * b;
                    }
                }
                out
            })
            .collect();
    }
    let top = links.last().unwrap();
    let composite = match check_subsystem(&top.ambient, &cur)? {
        SubsystemOutcome::Certified(c) => c,
        SubsystemOutcome::DifferenceIsRoot { i, j, .. } => {
            return Err(RootError::Lift(format!("composite fails: difference of roots {i} and {j} is a root")))
        }
    };
    let choice_links: Vec<usize> = links
        .iter()
        .enumerate()
        .filter(|(_, l)| crystallographic_variants(&l.ambient.dynkin.base).len() > 1)
        .map(|(i, _)| i)
        .collect();
    let mut warnings = Vec::new();
    if choice_links.len() > 1 {
        warnings.push(format!("{} links carry a length choice", choice_links.len()));
    }
    Ok(TowerCertificate { links: links.to_vec(), composite, choice_links, warnings })
}

/// Order of a finite Coxeter group from its connected component types.
pub fn finite_group_order(d: &CoxeterDiagram) -> Option<u128> {
    let mut order: u128 = 1;
    for c in components(d) {
        let (kind, name) = component_type(&d.subdiagram(&c))?;
        if kind != ComponentKind::Finite {
            return None;
        }
        let fact = |n: u128| (1..=n).product::<u128>();
        let num = |s: &str| s.parse::<u128>().ok();
        let o = match name.as_str() {
            "E6" => 51_840,
            "E7" => 2_903_040,
            "E8" => 696_729_600,
            "F4" => 1152,
            "G2" => 12,
            "H3" => 120,
            "H4" => 14_400,
            s if s.starts_with("I2(") => 2 * num(&s[3..s.len() - 1])?,
            s if s.starts_with('A') => fact(num(&s[1..])? + 1),
            s if s.starts_with('B') => (1u128 << num(&s[1..])?) * fact(num(&s[1..])?),
            s if s.starts_with('D') => (1u128 << (num(&s[1..])? - 1)) * fact(num(&s[1..])?),
            _ => return None,
        };
        order = order.checked_mul(o)?;
    }
    Some(order)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ReflectionSubgroup {
    /// Only one root length: the subgroup is G itself.
    Whole,
    /// Fundamental polytope P = ⋃_{g∈G₁} gF, G₁ generated by the simple
    /// reflections of the other length.
    Polytope {
        /// Outward normals of P in the simple-root basis.
        normals: Vec<Vec<i64>>,
        /// Pairwise marks between facets (label, parallel or divergent).
        marks: Vec<Vec<Option<EdgeMark>>>,
        /// Coxeter diagram when no pair is divergent.
        diagram: Option<CoxeterDiagram>,
        index: u128,
    },
    /// The other-length simple roots span an affine subdiagram.
    InfiniteIndex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortLong {
    pub short: ReflectionSubgroup,
    pub long: ReflectionSubgroup,
}

fn subgroup_of_length(spec: &RootSystemSpec, keep: &[usize], other: &[usize]) -> ReflectionSubgroup {
    let d = &spec.dynkin.base;
    let g1 = d.subdiagram(other);
    let Some(index) = finite_group_order(&g1) else {
        return ReflectionSubgroup::InfiniteIndex;
    };
    let n = spec.rank();
    let reflect = |x: &[i64], i: usize| -> Vec<i64> {
        let bx: i128 = spec.gram[i].iter().zip(x).map(|(g, c)| *g as i128 * *c as i128).sum();
        let f = (2 * bx / spec.gram[i][i] as i128) as i64;
        let mut y = x.to_vec();
        y[i] -= f;
        y
    };
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut normals: Vec<Vec<i64>> = Vec::new();
    for &s in keep {
        let e: Vec<i64> = (0..n).map(|k| (k == s) as i64).collect();
        if seen.insert(e.clone()) {
            normals.push(e);
        }
    }
    let mut k = 0;
    while k < normals.len() {
        let x = normals[k].clone();
        k += 1;
        for &i in other {
            let y = reflect(&x, i);
            if seen.insert(y.clone()) {
                normals.push(y);
            }
        }
    }
    let real = Realization::new(d, Some(&spec.dynkin.norms)).expect("hyperbolic variant");
    let field: Vec<Vec<FieldScalar>> =
        normals.iter().map(|v| v.iter().map(|&c| FieldScalar::from_integer(c)).collect()).collect();
    let m = normals.len();
    let mut marks = vec![vec![None; m]; m];
    let mut diagram = Some(CoxeterDiagram::empty(m));
    for a in 0..m {
        for b in a + 1..m {
            let p = crate::chamber_search::normalized_product(&real, &field[a], &field[b]);
            let mark = p.map(|p| crate::diagrams::mark_from_product(&p)).unwrap_or(EdgeMark::Irregular);
            marks[a][b] = Some(mark);
            marks[b][a] = Some(mark);
            match (mark, diagram.as_mut()) {
                (EdgeMark::Label(l), Some(dg)) => dg.set(a, b, l),
                _ => diagram = None,
            }
        }
    }
    ReflectionSubgroup::Polytope { normals, marks, diagram, index }
}

/// The subgroups generated by all short and by all long reflections.
pub fn short_long(variant: &DynkinDiagram) -> ShortLong {
    let spec = RootSystemSpec::new(variant.clone());
    let n = variant.rank();
    let min = *variant.norms.iter().min().unwrap();
    let max = *variant.norms.iter().max().unwrap();
    if min == max {
        return ShortLong { short: ReflectionSubgroup::Whole, long: ReflectionSubgroup::Whole };
    }
    let short: Vec<usize> = (0..n).filter(|&i| variant.norms[i] == min).collect();
    let long: Vec<usize> = (0..n).filter(|&i| variant.norms[i] != min).collect();
    ShortLong { short: subgroup_of_length(&spec, &short, &long), long: subgroup_of_length(&spec, &long, &short) }
}

/// Root system of the first crystallographic variant.
pub fn default_spec(d: &CoxeterDiagram) -> Option<RootSystemSpec> {
    crystallographic_variants(d).into_iter().next().map(RootSystemSpec::new)
}
