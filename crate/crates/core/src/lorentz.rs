//! Lorentzian realization of a simplex group: vertices, distances,
//! standard horoballs, the truncated diameter D_F and the search radius.
//!
//! Vectors are coordinate vectors over the simple normals v_0..v_n with
//! inner product given by the Gram matrix B. The chamber is
//! {x : ⟨x, v_i⟩ ≤ 0 for all i}, and vertex i is q_i = −B⁻¹e_i, so that
//! ⟨q_i, v_j⟩ = −δ_ij.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagrams::{classify, component_type, components, gram_of, CoxeterDiagram, Normalization};
use crate::scalars::{bilinear, dot, invert, mat_vec, CertifiedInterval, FieldScalar, Matrix, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LorentzError {
    #[error("diagram is not a hyperbolic simplex")]
    NotSimplicial,
    #[error("vertex {0} is ideal, so its stabilizer is infinite")]
    IdealAnchor(usize),
    #[error("vertex index {0} out of range")]
    BadVertex(usize),
    #[error("squared lengths do not match the diagram")]
    BadNorms,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexKind {
    Ordinary,
    Ideal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexPoint {
    pub coords: Vec<FieldScalar>,
    pub kind: VertexKind,
}

/// Exact realization of a simplex in its Gram form.
#[derive(Clone, Debug)]
pub struct Realization {
    pub diagram: CoxeterDiagram,
    /// Squared lengths of the simple normals, `None` for unit normals.
    pub norms: Option<Vec<u32>>,
    pub gram: Matrix,
    pub inverse: Matrix,
    pub vertices: Vec<VertexPoint>,
}

/// √q for a non-negative rational whose square-free part is a radicand.
pub fn sqrt_rational(q: &BigRational) -> Option<FieldScalar> {
    if q.is_negative() {
        return None;
    }
    let prod = q.numer() * q.denom();
    let n = prod.to_u64()?;
    let root = FieldScalar::sqrt_of(n)?;
    Some(root.scale(&BigRational::new(BigInt::one(), q.denom().clone())))
}

/// √x for field elements that happen to be such rationals.
fn sqrt_field(x: &FieldScalar) -> Option<FieldScalar> {
    sqrt_rational(&x.to_rational()?)
}

pub fn unit_basis(n: usize, k: usize) -> Vec<FieldScalar> {
    (0..n).map(|t| if t == k { FieldScalar::one() } else { FieldScalar::zero() }).collect()
}

impl Realization {
    /// Realize a hyperbolic simplex diagram with unit normals or with the
    /// given squared root lengths.
    pub fn new(diagram: &CoxeterDiagram, norms: Option<&[u32]>) -> Result<Self, LorentzError> {
        if !classify(diagram).is_hyperbolic_simplicial() {
            return Err(LorentzError::NotSimplicial);
        }
        if norms.is_some_and(|q| q.len() != diagram.rank()) {
            return Err(LorentzError::BadNorms);
        }
        let gram = match norms {
            Some(q) => gram_of(diagram, &Normalization::Root(q)),
            None => gram_of(diagram, &Normalization::Unit),
        };
        Self::from_gram(diagram.clone(), norms.map(|q| q.to_vec()), gram)
    }

    fn from_gram(diagram: CoxeterDiagram, norms: Option<Vec<u32>>, gram: Matrix) -> Result<Self, LorentzError> {
        let n = diagram.rank();
        let inverse = invert(&gram).ok_or(LorentzError::NotSimplicial)?;
        let vertices = (0..n)
            .map(|i| {
                let coords: Vec<FieldScalar> = (0..n).map(|j| -&inverse[j][i]).collect();
                let kind = match inverse[i][i].sign() {
                    Sign::Zero => VertexKind::Ideal,
                    _ => VertexKind::Ordinary,
                };
                VertexPoint { coords, kind }
            })
            .collect();
        Ok(Realization { diagram, norms, gram, inverse, vertices })
    }

    pub fn rank(&self) -> usize {
        self.diagram.rank()
    }

    pub fn inner(&self, a: &[FieldScalar], b: &[FieldScalar]) -> FieldScalar {
        bilinear(&self.gram, a, b)
    }

    /// B·a, so that ⟨a, b⟩ = (B·a)·b.
    pub fn lower(&self, a: &[FieldScalar]) -> Vec<FieldScalar> {
        mat_vec(&self.gram, a)
    }

    pub fn simple_normal(&self, i: usize) -> Vec<FieldScalar> {
        unit_basis(self.rank(), i)
    }

    /// r_e(x) = x − 2⟨x,e⟩/⟨e,e⟩ · e.
    pub fn reflect(&self, x: &[FieldScalar], e: &[FieldScalar]) -> Vec<FieldScalar> {
        let f = (self.inner(x, e) * FieldScalar::from_integer(2))
            .checked_div(&self.inner(e, e))
            .expect("mirror normal has positive norm");
        x.iter().zip(e).map(|(a, b)| a - &(&f * b)).collect()
    }

    pub fn is_compact(&self) -> bool {
        self.vertices.iter().all(|v| v.kind == VertexKind::Ordinary)
    }

    pub fn ideal_vertices(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.vertices[i].kind == VertexKind::Ideal).collect()
    }

    /// Vector scaled to unit length; needs ⟨x,x⟩ to be a rational with
    /// a square root in the field (true for every mirror normal here).
    pub fn unit_vector(&self, x: &[FieldScalar]) -> Option<Vec<FieldScalar>> {
        let n = self.inner(x, x);
        if n.is_one() {
            return Some(x.to_vec());
        }
        let s = sqrt_field(&n)?.inverse().ok()?;
        Some(x.iter().map(|a| a * &s).collect())
    }

    /// Normalized product ⟨a,b⟩² / (⟨a,a⟩⟨b,b⟩), exact.
    pub fn cos_squared(&self, a: &[FieldScalar], b: &[FieldScalar]) -> FieldScalar {
        let ab = self.inner(a, b);
        (&ab * &ab)
            .checked_div(&(self.inner(a, a) * self.inner(b, b)))
            .expect("non-null vectors")
    }

    /// Convert coordinates over unit normals into coordinates over the
    /// root normals of this realization (identity for unit realizations).
    pub fn from_unit_coords(&self, x: &[FieldScalar]) -> Vec<FieldScalar> {
        match &self.norms {
            None => x.to_vec(),
            Some(q) => x
                .iter()
                .zip(q)
                .map(|(a, &qi)| {
                    a * &FieldScalar::sqrt_of(qi as u64).expect("supported length").inverse().unwrap()
                })
                .collect(),
        }
    }
}

/// Relative position of two mirrors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MirrorRelation {
    Intersecting,
    Parallel,
    Divergent,
}

/// Hyperbolic objects for [`distance`].
#[derive(Clone, Debug)]
pub enum Object<'a> {
    Point(&'a [FieldScalar]),
    Mirror(&'a [FieldScalar]),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Distance {
    pub value: CertifiedInterval,
    /// Set for mirror pairs.
    pub relation: Option<MirrorRelation>,
}

fn acosh_of_square(c2: &FieldScalar) -> CertifiedInterval {
    if c2.is_one() {
        return CertifiedInterval::zero();
    }
    CertifiedInterval::from_field(c2).sqrt().acosh()
}

/// Distance between points (timelike vectors) and mirrors (spacelike
/// normals). Only the final transcendental step is approximate.
pub fn distance(r: &Realization, a: Object, b: Object) -> Distance {
    match (a, b) {
        (Object::Point(x), Object::Point(y)) => {
            let c2 = r.cos_squared(x, y);
            Distance { value: acosh_of_square(&c2), relation: None }
        }
        (Object::Point(x), Object::Mirror(e)) | (Object::Mirror(e), Object::Point(x)) => {
            let xe = r.inner(x, e);
            if xe.is_zero() {
                return Distance { value: CertifiedInterval::zero(), relation: None };
            }
            let s2 = (&xe * &xe).checked_div(&-(r.inner(x, x) * r.inner(e, e))).unwrap();
            Distance { value: CertifiedInterval::from_field(&s2).sqrt().asinh(), relation: None }
        }
        (Object::Mirror(e), Object::Mirror(f)) => {
            let c2 = r.cos_squared(e, f);
            match (&c2 - &FieldScalar::one()).sign() {
                Sign::Negative => {
                    Distance { value: CertifiedInterval::zero(), relation: Some(MirrorRelation::Intersecting) }
                }
                Sign::Zero => Distance { value: CertifiedInterval::zero(), relation: Some(MirrorRelation::Parallel) },
                Sign::Positive => {
                    Distance { value: acosh_of_square(&c2), relation: Some(MirrorRelation::Divergent) }
                }
            }
        }
    }
}

/// A point given as Σ c_k · x_k with exact vectors x_k and enclosed
/// real coefficients c_k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxPoint {
    pub terms: Vec<(CertifiedInterval, Vec<FieldScalar>)>,
}

impl ApproxPoint {
    pub fn exact(x: &[FieldScalar]) -> Self {
        ApproxPoint { terms: vec![(CertifiedInterval::point(1.0), x.to_vec())] }
    }

    /// Enclosure of ⟨self, e⟩ for an exact vector e.
    pub fn inner_exact(&self, r: &Realization, e: &[FieldScalar]) -> CertifiedInterval {
        let be = r.lower(e);
        self.terms.iter().fold(CertifiedInterval::zero(), |acc, (c, x)| {
            let p = dot(x, &be);
            acc.add(&c.mul(&CertifiedInterval::from_field(&p)))
        })
    }

    pub fn inner(&self, r: &Realization, other: &ApproxPoint) -> CertifiedInterval {
        other
            .terms
            .iter()
            .fold(CertifiedInterval::zero(), |acc, (c, y)| acc.add(&c.mul(&self.inner_exact(r, y))))
    }

    pub fn sum(points: &[ApproxPoint]) -> ApproxPoint {
        ApproxPoint { terms: points.iter().flat_map(|p| p.terms.iter().cloned()).collect() }
    }

    /// Map coordinates through `f` (e.g. a change of normalization).
    pub fn map_coords(&self, f: impl Fn(&[FieldScalar]) -> Vec<FieldScalar>) -> ApproxPoint {
        ApproxPoint { terms: self.terms.iter().map(|(c, x)| (*c, f(x))).collect() }
    }
}

/// Enclosure of the distance between two approximate points.
pub fn approx_point_distance(r: &Realization, a: &ApproxPoint, b: &ApproxPoint) -> CertifiedInterval {
    let ab = a.inner(r, b);
    let aa = a.inner(r, a).neg();
    let bb = b.inner(r, b).neg();
    let denom = aa.mul(&bb).sqrt();
    match ab.neg().div(&denom) {
        Some(c) => c.acosh(),
        None => CertifiedInterval::new(0.0, f64::INFINITY),
    }
}

/// Lower and upper enclosure of the distance from an approximate point to
/// a mirror, plus the side: positive when ⟨x,e⟩ > 0 certainly.
pub fn approx_point_mirror(r: &Realization, x: &ApproxPoint, e: &[FieldScalar]) -> (CertifiedInterval, CertifiedInterval) {
    let xe = x.inner_exact(r, e);
    let xx = x.inner(r, x).neg();
    let ee = CertifiedInterval::from_field(&r.inner(e, e));
    let denom = xx.mul(&ee).sqrt();
    let s = match xe.div(&denom) {
        Some(v) => v,
        None => CertifiedInterval::new(f64::NEG_INFINITY, f64::INFINITY),
    };
    (xe, s)
}

/// Standard horoball data at an ideal vertex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Horoball {
    pub vertex: usize,
    /// Affine types of the components of the cusp diagram.
    pub cusp_type: Vec<String>,
    /// c² for the shortest translation r_f r_g found, where f + g = c·p
    /// for parallel unit normals f, g and the vertex vector p.
    pub translation_c2: FieldScalar,
    /// Horoball level s: the ball is {y : −⟨y,p⟩ ≤ s, ⟨y,y⟩ = −1};
    /// s is a certified lower bound for the standard level √((cosh 1 − 1)/(2c²)).
    pub level: f64,
}

/// Parallel unit-normal pairs in the cusp group at `vertex`; returns the
/// smallest c² with f + g = c·p.
fn minimal_translation(r: &Realization, vertex: usize) -> Option<FieldScalar> {
    let n = r.rank();
    let p = &r.vertices[vertex].coords;
    let cusp: Vec<usize> = (0..n).filter(|&j| j != vertex).collect();
    let sub = r.diagram.subdiagram(&cusp);
    let mut best: Option<FieldScalar> = None;
    for comp in components(&sub) {
        let comp: Vec<usize> = comp.iter().map(|&k| cusp[k]).collect();
        if comp.len() < 2 {
            continue;
        }
        let units: Vec<Vec<FieldScalar>> =
            comp.iter().map(|&j| r.unit_vector(&r.simple_normal(j)).expect("simple normal")).collect();
        for skip in 0..comp.len() {
            // orbit of the component's unit normals under the finite group
            // generated by the other reflections
            let gens: Vec<&Vec<FieldScalar>> =
                units.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, u)| u).collect();
            let mut orbit: Vec<Vec<FieldScalar>> = units.clone();
            let mut seen: HashSet<Vec<FieldScalar>> = orbit.iter().cloned().collect();
            let mut k = 0;
            while k < orbit.len() && orbit.len() < 5000 {
                let x = orbit[k].clone();
                k += 1;
                for g in &gens {
                    let y = r.reflect(&x, g);
                    if seen.insert(y.clone()) {
                        orbit.push(y);
                    }
                }
            }
            let lowered: Vec<Vec<FieldScalar>> = orbit.iter().map(|x| r.lower(x)).collect();
            let minus_one = FieldScalar::from_integer(-1);
            for a in 0..orbit.len() {
                for b in a + 1..orbit.len() {
                    if dot(&orbit[a], &lowered[b]) != minus_one {
                        continue;
                    }
                    let s: Vec<FieldScalar> = orbit[a].iter().zip(&orbit[b]).map(|(x, y)| x + y).collect();
                    let Some(t) = p.iter().position(|c| !c.is_zero()) else {
                        continue;
                    };
                    let c = s[t].checked_div(&p[t]).unwrap();
                    if c.is_zero() {
                        // g = −f, the same mirror
                        continue;
                    }
                    debug_assert!(s.iter().zip(p).all(|(x, y)| *x == &c * y));
                    let c2 = c.square();
                    if best.as_ref().is_none_or(|b| c2.cmp_value(b).is_lt()) {
                        best = Some(c2);
                    }
                }
            }
        }
    }
    best
}

/// Standard horoballs at every ideal vertex (empty for compact simplices).
pub fn standard_horoballs(r: &Realization) -> Vec<Horoball> {
    let cosh1_minus_1 = CertifiedInterval::point(1.0).cosh().sub(&CertifiedInterval::point(1.0));
    r.ideal_vertices()
        .into_iter()
        .map(|v| {
            let cusp: Vec<usize> = (0..r.rank()).filter(|&j| j != v).collect();
            let sub = r.diagram.subdiagram(&cusp);
            let cusp_type = components(&sub)
                .iter()
                .map(|c| component_type(&sub.subdiagram(c)).map(|t| t.1).unwrap_or_else(|| "?".into()))
                .collect();
            let c2 = minimal_translation(r, v).expect("affine cusp has parallel mirrors");
            let denom = CertifiedInterval::from_field(&c2).mul(&CertifiedInterval::point(2.0));
            let level = cosh1_minus_1.div(&denom).expect("c² > 0").sqrt().lo;
            Horoball { vertex: v, cusp_type, translation_c2: c2, level }
        })
        .collect()
}

/// Where a vertex of the truncated chamber comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WSource {
    Vertex(usize),
    /// Edge from ideal vertex `ideal` toward vertex `toward`, cut by the
    /// horosphere at `ideal`.
    Edge { ideal: usize, toward: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WPoint {
    pub source: WSource,
    pub point: ApproxPoint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruncatedChamberData {
    pub ordinary: Vec<usize>,
    pub horoballs: Vec<Horoball>,
    pub w_points: Vec<WPoint>,
    pub diameter: CertifiedInterval,
}

fn edge_point(r: &Realization, ideal: usize, toward: usize, s: f64) -> ApproxPoint {
    let p = &r.vertices[ideal].coords;
    let q = &r.vertices[toward].coords;
    let s_iv = CertifiedInterval::point(s);
    let a_exact = -r.inner(q, p);
    let a = CertifiedInterval::from_field(&a_exact);
    match r.vertices[toward].kind {
        VertexKind::Ordinary => {
            // y = (s/A)·q + (1/(2s) − s·N/(2A²))·p with A = −⟨q,p⟩, N = −⟨q,q⟩
            let n_exact = -r.inner(q, q);
            let n = CertifiedInterval::from_field(&n_exact);
            let a_norm2 = a.mul(&a).div(&n).unwrap();
            if a_norm2.hi < s * s {
                // the vertex itself lies inside the horoball
                let coef = CertifiedInterval::point(1.0).div(&n.sqrt()).unwrap();
                return ApproxPoint { terms: vec![(coef, q.clone())] };
            }
            let alpha = s_iv.div(&a).unwrap();
            let two_s = s_iv.mul(&CertifiedInterval::point(2.0));
            let beta = CertifiedInterval::point(1.0)
                .div(&two_s)
                .unwrap()
                .sub(&s_iv.mul(&n).div(&a.mul(&a).mul(&CertifiedInterval::point(2.0))).unwrap());
            ApproxPoint { terms: vec![(alpha, q.clone()), (beta, p.clone())] }
        }
        VertexKind::Ideal => {
            // y = p/(2s) + (s/A)·q with A = −⟨p,q⟩
            let two_s = s_iv.mul(&CertifiedInterval::point(2.0));
            let alpha = CertifiedInterval::point(1.0).div(&two_s).unwrap();
            let beta = s_iv.div(&a).unwrap();
            ApproxPoint { terms: vec![(alpha, p.clone()), (beta, q.clone())] }
        }
    }
}

fn ordinary_point(r: &Realization, i: usize) -> ApproxPoint {
    let q = &r.vertices[i].coords;
    let n = CertifiedInterval::from_field(&-r.inner(q, q));
    ApproxPoint { terms: vec![(CertifiedInterval::point(1.0).div(&n.sqrt()).unwrap(), q.clone())] }
}

/// Vertices of the chamber with standard horoballs removed, and the
/// diameter D_F as the maximal pairwise distance between them.
pub fn truncated_diameter(r: &Realization) -> TruncatedChamberData {
    let n = r.rank();
    let horoballs = standard_horoballs(r);
    let ordinary: Vec<usize> = (0..n).filter(|&i| r.vertices[i].kind == VertexKind::Ordinary).collect();
    let mut w_points: Vec<WPoint> =
        ordinary.iter().map(|&i| WPoint { source: WSource::Vertex(i), point: ordinary_point(r, i) }).collect();
    for h in &horoballs {
        for j in 0..n {
            if j != h.vertex {
                w_points.push(WPoint {
                    source: WSource::Edge { ideal: h.vertex, toward: j },
                    point: edge_point(r, h.vertex, j, h.level),
                });
            }
        }
    }
    let mut diameter = CertifiedInterval::zero();
    for a in 0..w_points.len() {
        for b in a + 1..w_points.len() {
            let dist = match (w_points[a].source, w_points[b].source) {
                (WSource::Vertex(i), WSource::Vertex(j)) => {
                    distance(r, Object::Point(&r.vertices[i].coords), Object::Point(&r.vertices[j].coords)).value
                }
                _ => approx_point_distance(r, &w_points[a].point, &w_points[b].point),
            };
            diameter = diameter.max(&dist);
        }
    }
    TruncatedChamberData { ordinary, horoballs, w_points, diameter }
}

/// The base point O on the face of the chamber cut out by the anchor
/// mirrors: a vertex when the face is a single ordinary vertex, else the
/// barycenter of the truncated-chamber vertices on the face.
pub fn base_point(r: &Realization, data: &TruncatedChamberData, anchor_facets: &[usize]) -> ApproxPoint {
    let face: Vec<usize> = (0..r.rank()).filter(|i| !anchor_facets.contains(i)).collect();
    if face.len() == 1 && r.vertices[face[0]].kind == VertexKind::Ordinary {
        return ApproxPoint::exact(&r.vertices[face[0]].coords);
    }
    let on_face: Vec<ApproxPoint> = data
        .w_points
        .iter()
        .filter(|w| match w.source {
            WSource::Vertex(i) => face.contains(&i),
            WSource::Edge { ideal, toward } => face.contains(&ideal) && face.contains(&toward),
        })
        .map(|w| w.point.clone())
        .collect();
    ApproxPoint::sum(&on_face)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchRadius {
    pub d: CertifiedInterval,
    pub d_f: CertifiedInterval,
    pub r: CertifiedInterval,
    pub cocompact: bool,
}

/// Distance from vertex `anchor_vertex` of H's own simplex to the
/// opposite facet: sinh²d = −1/(B⁻¹)_jj in unit normalization.
pub fn altitude(h: &Realization, anchor_vertex: usize) -> Result<CertifiedInterval, LorentzError> {
    if anchor_vertex >= h.rank() {
        return Err(LorentzError::BadVertex(anchor_vertex));
    }
    let q = &h.vertices[anchor_vertex].coords;
    if h.vertices[anchor_vertex].kind == VertexKind::Ideal {
        return Err(LorentzError::IdealAnchor(anchor_vertex));
    }
    Ok(distance(h, Object::Point(q), Object::Mirror(&h.simple_normal(anchor_vertex))).value)
}

/// R = d + D_F for cocompact G, 2d + D_F otherwise.
pub fn search_radius(
    h: &Realization,
    anchor_vertex: usize,
    g_data: &TruncatedChamberData,
) -> Result<SearchRadius, LorentzError> {
    let d = altitude(h, anchor_vertex)?;
    let cocompact = g_data.horoballs.is_empty();
    let r = if cocompact { d.add(&g_data.diameter) } else { d.add(&d).add(&g_data.diameter) };
    Ok(SearchRadius { d, d_f: g_data.diameter, r, cocompact })
}

/// Area of a hyperbolic triangle in units of π: 1 − 1/p − 1/q − 1/r with
/// 1/∞ = 0. `None` unless the diagram has rank 3.
pub fn triangle_area_over_pi(d: &CoxeterDiagram) -> Option<BigRational> {
    if d.rank() != 3 {
        return None;
    }
    let mut a = BigRational::one();
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        if let Some(m) = d.label(i, j).order() {
            a -= BigRational::new(BigInt::one(), BigInt::from(m));
        }
    }
    Some(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{named_diagram, triangle};

    #[test]
    fn vertex_kinds() {
        let r = Realization::new(&triangle(2, 3, 7).unwrap(), None).unwrap();
        assert!(r.is_compact());
        let r = Realization::new(&triangle(0, 0, 3).unwrap(), None).unwrap();
        assert_eq!(r.ideal_vertices().len(), 2);
        let r = Realization::new(&named_diagram("[3^{[3,3]}]").unwrap(), None).unwrap();
        assert_eq!(r.ideal_vertices().len(), 4);
        for v in &r.vertices {
            assert!(r.inner(&v.coords, &v.coords).is_zero());
        }
    }

    #[test]
    fn mirror_relations() {
        let r = Realization::new(&triangle(0, 0, 3).unwrap(), None).unwrap();
        let d = distance(&r, Object::Mirror(&r.simple_normal(0)), Object::Mirror(&r.simple_normal(1)));
        assert_eq!(d.relation, Some(MirrorRelation::Parallel));
        assert_eq!(r.vertices[1].kind, VertexKind::Ordinary);
        let x = &r.vertices[1].coords;
        assert_eq!(distance(&r, Object::Point(x), Object::Point(x)).value, CertifiedInterval::zero());
    }

    #[test]
    fn truncated_counts() {
        let r = Realization::new(&triangle(0, 0, 3).unwrap(), None).unwrap();
        let t = truncated_diameter(&r);
        assert_eq!(t.w_points.len(), 5);
        assert!(t.diameter.lo > 0.0 && t.diameter.hi.is_finite());
        let r = Realization::new(&named_diagram("[3^{[3,3]}]").unwrap(), None).unwrap();
        let t = truncated_diameter(&r);
        assert_eq!(t.w_points.len(), 12);
        assert!(t.diameter.lo > 0.0 && t.diameter.hi.is_finite());
    }

    #[test]
    fn areas() {
        let g = triangle_area_over_pi(&triangle(2, 3, 7).unwrap()).unwrap();
        let h = triangle_area_over_pi(&triangle(3, 3, 7).unwrap()).unwrap();
        assert_eq!(g, BigRational::new(1.into(), 42.into()));
        assert_eq!(h / g, BigRational::from_integer(8.into()));
    }
}
