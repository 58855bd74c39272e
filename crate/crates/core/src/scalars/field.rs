//! Exact arithmetic in Q(√2, √3, √5, θ) where θ = 2cos(2π/7).
//!
//! Elements are stored sparsely over the 24-element basis `√r · θ^j`
//! with r in {1, 2, 3, 5, 6, 10, 15, 30} and j in {0, 1, 2}. Elements
//! without θ-terms form the subfield Q(√2, √3, √5), which holds every
//! cosine of π/m for m in {2, 3, 4, 5, 6}; the θ-part is only needed for
//! label 7.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::OnceLock;

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ScalarError;

/// Square-free radicands of the √-part of the basis, in basis order.
pub const RADICANDS: [u32; 8] = [1, 2, 3, 5, 6, 10, 15, 30];

const BASIS_LEN: usize = 24;

/// Coefficients of θ^k for k = 0..=4 in the basis (1, θ, θ²), using
/// θ³ = 1 + 2θ − θ².
const THETA_POWERS: [[i64; 3]; 5] = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 2, -1], [-1, -1, 3]];

fn radicand_index(r: u32) -> Option<usize> {
    RADICANDS.iter().position(|&x| x == r)
}

/// √a · √b = f · √r for radicand indices a, b; returns (index of r, f).
fn sqrt_product(a: usize, b: usize) -> (usize, i64) {
    let mut p = RADICANDS[a] * RADICANDS[b];
    let mut r = 1u32;
    let mut f = 1i64;
    for prime in [2u32, 3, 5] {
        let mut e = 0;
        while p.is_multiple_of(prime) {
            p /= prime;
            e += 1;
        }
        if e % 2 == 1 {
            r *= prime;
        }
        f *= (prime as i64).pow(e / 2);
    }
    (radicand_index(r).expect("square-free product of radicands"), f)
}

/// Starting precision for the exact sign refinement; doubled until the
/// enclosure excludes zero.
static SIGN_START_BITS: AtomicU32 = AtomicU32::new(64);

pub fn set_sign_start_bits(bits: u32) {
    SIGN_START_BITS.store(bits, AtomicOrdering::Relaxed);
}

/// Exact sign of a real number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn to_ordering(self) -> Ordering {
        match self {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

/// An exact element of the number field.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldScalar {
    // sorted by basis index, no zero coefficients
    terms: Vec<(u8, BigRational)>,
}

impl FieldScalar {
    pub fn zero() -> Self {
        FieldScalar { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        if q.is_zero() {
            Self::zero()
        } else {
            FieldScalar { terms: vec![(0, q)] }
        }
    }

    /// √n for a positive integer n whose square-free part is a radicand.
    pub fn sqrt_of(n: u64) -> Option<Self> {
        if n == 0 {
            return Some(Self::zero());
        }
        let mut m = n;
        let mut r = 1u32;
        let mut f = 1u64;
        for prime in [2u64, 3, 5] {
            let mut e = 0;
            while m.is_multiple_of(prime) {
                m /= prime;
                e += 1;
            }
            if e % 2 == 1 {
                r *= prime as u32;
            }
            f *= prime.pow(e / 2);
        }
        let s = num_integer::Roots::sqrt(&m);
        if s * s != m {
            return None;
        }
        f *= s;
        let idx = radicand_index(r)?;
        Some(FieldScalar::from_terms(vec![(
            (idx * 3) as u8,
            BigRational::from_integer(BigInt::from(f)),
        )]))
    }

    /// θ = 2cos(2π/7).
    pub fn theta() -> Self {
        FieldScalar::from_terms(vec![(1, BigRational::one())])
    }

    /// cos(π/m) for the labels the field supports (m = 1..=7 except none).
    pub fn cos_pi_over(m: u32) -> Option<Self> {
        match m {
            1 => Some(Self::from_integer(-1)),
            2 => Some(Self::zero()),
            3 => Some(Self::from_ratio(1, 2)),
            4 => Some(Self::sqrt_of(2)? * Self::from_ratio(1, 2)),
            5 => Some((Self::one() + Self::sqrt_of(5)?) * Self::from_ratio(1, 4)),
            6 => Some(Self::sqrt_of(3)? * Self::from_ratio(1, 2)),
            // cos(π/7) = (θ² + θ − 1)/2
            7 => {
                let t = Self::theta();
                Some((&(&t * &t) + &t - Self::one()) * Self::from_ratio(1, 2))
            }
            _ => None,
        }
    }

    fn from_terms(mut terms: Vec<(u8, BigRational)>) -> Self {
        terms.sort_by_key(|t| t.0);
        let mut out: Vec<(u8, BigRational)> = Vec::with_capacity(terms.len());
        for (i, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == i => last.1 += c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        FieldScalar { terms: out }
    }

    /// Coefficient on the basis element √r·θ^j (zero if absent or r invalid).
    pub fn coefficient(&self, radicand: u32, theta_power: usize) -> BigRational {
        let Some(ri) = radicand_index(radicand) else {
            return BigRational::zero();
        };
        let idx = (ri * 3 + theta_power) as u8;
        self.terms
            .iter()
            .find(|t| t.0 == idx)
            .map(|t| t.1.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.iter().all(|t| t.0 == 0)
    }

    pub fn has_theta(&self) -> bool {
        self.terms.iter().any(|t| t.0 % 3 != 0)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(0, q)] => Some(q.clone()),
            _ => None,
        }
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        let q = self.to_rational()?;
        if q.is_integer() {
            Some(q.to_integer())
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        self.to_integer().is_some()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, usize, &BigRational)> {
        self.terms
            .iter()
            .map(|(i, c)| (RADICANDS[(*i / 3) as usize], (*i % 3) as usize, c))
    }

    fn map_coefficients(&self, f: impl Fn(u8, &BigRational) -> BigRational) -> Self {
        FieldScalar {
            terms: self
                .terms
                .iter()
                .map(|(i, c)| (*i, f(*i, c)))
                .filter(|t| !t.1.is_zero())
                .collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        if q.is_one() {
            return self.clone();
        }
        self.map_coefficients(|_, c| mul_cancelled(c, q))
    }

    /// Galois conjugation √p ↦ −√p for a prime p in {2, 3, 5}.
    fn conjugate_sqrt(&self, prime: u32) -> Self {
        self.map_coefficients(|i, c| {
            if RADICANDS[(i / 3) as usize].is_multiple_of(prime) {
                -c
            } else {
                c.clone()
            }
        })
    }

    /// The automorphism θ ↦ θ² − 2 of Q(θ), extended trivially to the √-part.
    fn conjugate_theta(&self) -> Self {
        // images of 1, θ, θ² in the basis (1, θ, θ²)
        const IMAGES: [[i64; 3]; 3] = [[1, 0, 0], [-2, 0, 1], [3, -1, -1]];
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for (i, c) in &self.terms {
            let base = i - i % 3;
            for (k, &v) in IMAGES[(i % 3) as usize].iter().enumerate() {
                if v != 0 {
                    out.push((base + k as u8, c * BigRational::from_integer(BigInt::from(v))));
                }
            }
        }
        FieldScalar::from_terms(out)
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inverse(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        // Multiply through by conjugates until only a rational remains.
        let mut numerator = Self::one();
        let mut current = self.clone();
        for prime in [5u32, 3, 2] {
            let conj = current.conjugate_sqrt(prime);
            if conj != current {
                current = &current * &conj;
                numerator = &numerator * &conj;
            }
        }
        if current.has_theta() {
            let c1 = current.conjugate_theta();
            let c2 = c1.conjugate_theta();
            let partner = &c1 * &c2;
            current = &current * &partner;
            numerator = &numerator * &partner;
        }
        let norm = current
            .to_rational()
            .expect("norm of a field element is rational");
        Ok(numerator.scale(&norm.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self * &other.inverse()?)
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Exact sign of the represented real number.
    pub fn sign(&self) -> Sign {
        if self.terms.is_empty() {
            return Sign::Zero;
        }
        if let Some(q) = self.to_rational() {
            return if q.is_positive() { Sign::Positive } else { Sign::Negative };
        }
        if let Some(s) = self.fast_sign() {
            return s;
        }
        let mut bits = SIGN_START_BITS.load(AtomicOrdering::Relaxed).max(16);
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Sign::Positive;
            }
            if hi.is_negative() {
                return Sign::Negative;
            }
            bits *= 2;
        }
    }

    fn fast_sign(&self) -> Option<Sign> {
        let consts = basis_f64();
        let mut sum = 0.0f64;
        let mut mag = 0.0f64;
        for (i, c) in &self.terms {
            let cf = c.to_f64()?;
            if !cf.is_finite() {
                return None;
            }
            let v = cf * consts[*i as usize];
            sum += v;
            mag += v.abs();
        }
        if !sum.is_finite() || !mag.is_finite() || mag < 1e-250 {
            return None;
        }
        if sum.abs() > 1e-9 * mag {
            Some(if sum > 0.0 { Sign::Positive } else { Sign::Negative })
        } else {
            None
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    /// Numeric comparison.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        (self - other).sign().to_ordering()
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Structural total order on representations (not numeric order),
    /// for deterministic sorting of keys.
    pub fn structural_cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }

    /// Rational enclosure lo ≤ x ≤ hi using basis enclosures at the
    /// given binary precision.
    pub fn enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        let basis = basis_enclosure(bits);
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (i, c) in &self.terms {
            let (blo, bhi) = &basis[*i as usize];
            if c.is_positive() {
                lo += c * blo;
                hi += c * bhi;
            } else {
                lo += c * bhi;
                hi += c * blo;
            }
        }
        (lo, hi)
    }

    /// Cheap f64 enclosure from per-term interval products. Can be much
    /// wider than [`FieldScalar::enclosure`] under cancellation.
    pub fn enclosure_f64(&self) -> (f64, f64) {
        let basis = basis_enclosure_f64();
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for (i, c) in &self.terms {
            let q = c.to_f64().unwrap_or(f64::NAN);
            if !q.is_finite() {
                return (f64::NEG_INFINITY, f64::INFINITY);
            }
            let (qlo, qhi) = (q.next_down(), q.next_up());
            let (blo, bhi) = basis[*i as usize];
            let p = [qlo * blo, qlo * bhi, qhi * blo, qhi * bhi];
            lo = (lo + p.iter().cloned().fold(f64::INFINITY, f64::min).next_down()).next_down();
            hi = (hi + p.iter().cloned().fold(f64::NEG_INFINITY, f64::max).next_up()).next_up();
        }
        (lo, hi)
    }

    /// Nearest-ish f64 value (not certified).
    pub fn to_f64(&self) -> f64 {
        if self.terms.iter().all(|(_, c)| c.to_f64().is_some_and(f64::is_finite)) {
            let consts = basis_f64();
            let v: f64 = self
                .terms
                .iter()
                .map(|(i, c)| c.to_f64().unwrap() * consts[*i as usize])
                .sum();
            if v.is_finite() {
                return v;
            }
        }
        let (lo, hi) = self.enclosure(128);
        ((lo + hi) / BigRational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
    }
}

fn basis_f64() -> &'static [f64; BASIS_LEN] {
    static VALUES: OnceLock<[f64; BASIS_LEN]> = OnceLock::new();
    VALUES.get_or_init(|| {
        let theta = 2.0 * (2.0 * std::f64::consts::PI / 7.0).cos();
        let mut out = [0.0; BASIS_LEN];
        for (ri, r) in RADICANDS.iter().enumerate() {
            let s = (*r as f64).sqrt();
            out[ri * 3] = s;
            out[ri * 3 + 1] = s * theta;
            out[ri * 3 + 2] = s * theta * theta;
        }
        out
    })
}

type Enclosures = Vec<(BigRational, BigRational)>;

fn basis_enclosure(bits: u32) -> std::sync::Arc<Enclosures> {
    const CACHED: [u32; 6] = [64, 128, 256, 512, 1024, 2048];
    static CACHE: [OnceLock<std::sync::Arc<Enclosures>>; 6] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    match CACHED.iter().position(|&b| b == bits) {
        Some(k) => CACHE[k]
            .get_or_init(|| std::sync::Arc::new(compute_basis_enclosure(bits)))
            .clone(),
        None => std::sync::Arc::new(compute_basis_enclosure(bits)),
    }
}

fn basis_enclosure_f64() -> &'static [(f64, f64); BASIS_LEN] {
    static VALUES: OnceLock<[(f64, f64); BASIS_LEN]> = OnceLock::new();
    VALUES.get_or_init(|| {
        let exact = basis_enclosure(64);
        let mut out = [(0.0, 0.0); BASIS_LEN];
        for (k, (lo, hi)) in exact.iter().enumerate() {
            out[k] = (lo.to_f64().unwrap().next_down(), hi.to_f64().unwrap().next_up());
        }
        out
    })
}

fn compute_basis_enclosure(bits: u32) -> Enclosures {
    let scale = BigInt::one() << bits;
    let ratio = |n: BigInt| BigRational::new(n, scale.clone());
    let (tlo, thi) = theta_bounds(bits);
    let mut out = Vec::with_capacity(BASIS_LEN);
    for r in RADICANDS {
        let s = num_integer::Roots::sqrt(&(BigInt::from(r) * &scale * &scale));
        let (slo, shi) = if &s * &s == BigInt::from(r) * &scale * &scale {
            (ratio(s.clone()), ratio(s))
        } else {
            (ratio(s.clone()), ratio(s + 1))
        };
        out.push((slo.clone(), shi.clone()));
        out.push((&slo * &tlo, &shi * &thi));
        out.push((&slo * &tlo * &tlo, &shi * &thi * &thi));
    }
    out
}

/// Dyadic bounds on θ, the root of x³ + x² − 2x − 1 in (1.24, 1.25).
fn theta_bounds(bits: u32) -> (BigRational, BigRational) {
    let scale = BigInt::one() << bits;
    // f(T/s)·s³ = T³ + T²s − 2Ts² − s³, increasing on the bracket
    let f = |t: &BigInt| -> BigSign {
        let v = t * t * t + t * t * &scale - BigInt::from(2) * t * &scale * &scale
            - &scale * &scale * &scale;
        v.sign()
    };
    let mut lo: BigInt = &scale * 124 / 100;
    let mut hi: BigInt = &scale * 125 / 100 + 1;
    debug_assert_eq!(f(&lo), BigSign::Minus);
    debug_assert_eq!(f(&hi), BigSign::Plus);
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        if f(&mid) == BigSign::Plus {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (
        BigRational::new(lo, scale.clone()),
        BigRational::new(hi, scale),
    )
}

/// `a·b` with cross-cancellation, so only small gcds are taken.
fn mul_cancelled(a: &BigRational, b: &BigRational) -> BigRational {
    let g1 = a.numer().gcd(b.denom());
    let g2 = b.numer().gcd(a.denom());
    BigRational::new_raw((a.numer() / &g1) * (b.numer() / &g2), (a.denom() / &g2) * (b.denom() / &g1))
}

fn mul_terms(a: &FieldScalar, b: &FieldScalar) -> FieldScalar {
    if a.is_zero() || b.is_zero() {
        return FieldScalar::zero();
    }
    if let Some(q) = a.to_rational() {
        return b.scale(&q);
    }
    if let Some(q) = b.to_rational() {
        return a.scale(&q);
    }
    // unreduced numerator/denominator per basis index, reduced once at the end
    let mut acc: Vec<Option<(BigInt, BigInt)>> = vec![None; BASIS_LEN];
    for (i, c) in &a.terms {
        for (j, d) in &b.terms {
            let (r, f) = sqrt_product((i / 3) as usize, (j / 3) as usize);
            let num = c.numer() * d.numer() * f;
            let den = c.denom() * d.denom();
            let tp = (i % 3 + j % 3) as usize;
            for (k, &v) in THETA_POWERS[tp].iter().enumerate() {
                if v == 0 {
                    continue;
                }
                let n = if v == 1 { num.clone() } else { &num * v };
                let slot = &mut acc[r * 3 + k];
                *slot = Some(match slot.take() {
                    None => (n, den.clone()),
                    Some((an, ad)) if ad == den => (an + n, ad),
                    Some((an, ad)) => (an * &den + n * &ad, ad * &den),
                });
            }
        }
    }
    let terms = acc
        .into_iter()
        .enumerate()
        .filter_map(|(k, t)| t.map(|(n, d)| (k as u8, BigRational::new(n, d))))
        .filter(|t| !t.1.is_zero())
        .collect();
    FieldScalar { terms }
}

fn add_terms(a: &FieldScalar, b: &FieldScalar, negate_b: bool) -> FieldScalar {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut x, mut y) = (0, 0);
    while x < a.terms.len() || y < b.terms.len() {
        let take_a = y >= b.terms.len() || (x < a.terms.len() && a.terms[x].0 < b.terms[y].0);
        let take_b = x >= a.terms.len() || (y < b.terms.len() && b.terms[y].0 < a.terms[x].0);
        if take_a {
            out.push(a.terms[x].clone());
            x += 1;
        } else if take_b {
            let (i, c) = &b.terms[y];
            out.push((*i, if negate_b { -c } else { c.clone() }));
            y += 1;
        } else {
            let c = if negate_b {
                &a.terms[x].1 - &b.terms[y].1
            } else {
                &a.terms[x].1 + &b.terms[y].1
            };
            if !c.is_zero() {
                out.push((a.terms[x].0, c));
            }
            x += 1;
            y += 1;
        }
    }
    FieldScalar { terms: out }
}

impl Add<&FieldScalar> for &FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: &FieldScalar) -> FieldScalar {
        add_terms(self, rhs, false)
    }
}

impl Sub<&FieldScalar> for &FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: &FieldScalar) -> FieldScalar {
        add_terms(self, rhs, true)
    }
}

impl Mul<&FieldScalar> for &FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: &FieldScalar) -> FieldScalar {
        mul_terms(self, rhs)
    }
}

/// Panics on division by zero; use [`FieldScalar::checked_div`] otherwise.
impl Div<&FieldScalar> for &FieldScalar {
    type Output = FieldScalar;
    fn div(self, rhs: &FieldScalar) -> FieldScalar {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &FieldScalar) -> FieldScalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<FieldScalar> for &FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&FieldScalar> for FieldScalar {
    fn add_assign(&mut self, rhs: &FieldScalar) {
        *self = add_terms(self, rhs, false);
    }
}

impl SubAssign<&FieldScalar> for FieldScalar {
    fn sub_assign(&mut self, rhs: &FieldScalar) {
        *self = add_terms(self, rhs, true);
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        self.map_coefficients(|_, c| -c)
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

impl From<i64> for FieldScalar {
    fn from(n: i64) -> Self {
        FieldScalar::from_integer(n)
    }
}

impl From<BigInt> for FieldScalar {
    fn from(n: BigInt) -> Self {
        FieldScalar::from_bigint(n)
    }
}

impl From<BigRational> for FieldScalar {
    fn from(q: BigRational) -> Self {
        FieldScalar::from_rational(q)
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for FieldScalar {
    /// `a + b√2 + c√3 + ...`, omitting zero terms; θ-terms carry a `θ` or
    /// `θ²` suffix. Zero renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.terms.iter().enumerate() {
            let r = RADICANDS[(*i / 3) as usize];
            let tp = *i % 3;
            let mag = c.abs();
            if n == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let has_unit = r != 1 || tp != 0;
            if !(has_unit && mag.is_one()) {
                write!(f, "{}", fmt_rational(&mag))?;
            }
            if r != 1 {
                write!(f, "√{r}")?;
            }
            match tp {
                1 => write!(f, "θ")?,
                2 => write!(f, "θ²")?,
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldScalar({self})")
    }
}

fn parse_term(tok: &str) -> Result<(u8, BigRational), ScalarError> {
    let bad = || ScalarError::Parse(tok.to_string());
    let mut rest = tok.trim();
    let mut tp = 0u8;
    if let Some(s) = rest.strip_suffix("θ²") {
        tp = 2;
        rest = s;
    } else if let Some(s) = rest.strip_suffix("θ") {
        tp = 1;
        rest = s;
    }
    let (coef_str, radicand) = match rest.find('√') {
        Some(pos) => {
            let r: u32 = rest[pos + '√'.len_utf8()..].trim().parse().map_err(|_| bad())?;
            (&rest[..pos], r)
        }
        None => (rest, 1),
    };
    let coef_str = coef_str.trim().trim_end_matches('*').trim();
    let coef = if coef_str.is_empty() {
        if radicand == 1 && tp == 0 {
            return Err(bad());
        }
        BigRational::one()
    } else if let Some((n, d)) = coef_str.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        BigRational::new(n, d)
    } else {
        BigRational::from_integer(coef_str.parse().map_err(|_| bad())?)
    };
    let ri = radicand_index(radicand).ok_or_else(bad)?;
    Ok(((ri * 3) as u8 + tp, coef))
}

impl FromStr for FieldScalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ScalarError::Parse(s.to_string()));
        }
        let mut terms = Vec::new();
        let mut negative = false;
        let mut current = String::new();
        let push = |tok: &str, neg: bool, terms: &mut Vec<(u8, BigRational)>| {
            let (i, c) = parse_term(tok)?;
            terms.push((i, if neg { -c } else { c }));
            Ok::<(), ScalarError>(())
        };
        for (pos, ch) in s.char_indices() {
            let at_sign = (ch == '+' || ch == '-')
                && !current.trim().is_empty()
                && !current.trim_end().ends_with('/');
            if at_sign {
                push(&current, negative, &mut terms)?;
                current.clear();
                negative = ch == '-';
            } else if (ch == '-' || ch == '+') && current.trim().is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
                let _ = pos;
            } else {
                current.push(ch);
            }
        }
        push(&current, negative, &mut terms)?;
        Ok(FieldScalar::from_terms(terms))
    }
}

impl Serialize for FieldScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
