//! Outward-rounded f64 intervals for metric comparisons.

use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::field::FieldScalar;

/// Relative padding applied to libm results, which are not correctly
/// rounded but are accurate to a couple of ulps.
const LIBM_SLACK: f64 = 8.0 * f64::EPSILON;

/// A closed interval [lo, hi] that is guaranteed to contain the value it
/// stands for.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInterval {
    pub lo: f64,
    pub hi: f64,
}

fn down(x: f64) -> f64 {
    if x.is_nan() {
        f64::NEG_INFINITY
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x.next_up()
    }
}

fn pad_down(x: f64) -> f64 {
    down(x - x.abs() * LIBM_SLACK)
}

fn pad_up(x: f64) -> f64 {
    up(x + x.abs() * LIBM_SLACK)
}

fn rational_down(q: &BigRational) -> f64 {
    down(q.to_f64().unwrap_or(f64::NEG_INFINITY))
}

fn rational_up(q: &BigRational) -> f64 {
    up(q.to_f64().unwrap_or(f64::INFINITY))
}

impl CertifiedInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        CertifiedInterval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        CertifiedInterval { lo: x, hi: x }
    }

    pub fn zero() -> Self {
        Self::point(0.0)
    }

    pub fn from_rational(q: &BigRational) -> Self {
        CertifiedInterval { lo: rational_down(q), hi: rational_up(q) }
    }

    /// Enclosure of an exact field element.
    pub fn from_field(x: &FieldScalar) -> Self {
        if let Some(q) = x.to_rational() {
            return Self::from_rational(&q);
        }
        let (lo, hi) = x.enclosure_f64();
        if (lo > 0.0 || hi < 0.0) && hi - lo <= 1e-12 * lo.abs().max(hi.abs()) {
            return CertifiedInterval { lo, hi };
        }
        let (lo, hi) = x.enclosure(64);
        CertifiedInterval { lo: rational_down(&lo), hi: rational_up(&hi) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi < 0.0
    }

    pub fn hull(&self, other: &Self) -> Self {
        CertifiedInterval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn add(&self, o: &Self) -> Self {
        CertifiedInterval { lo: down(self.lo + o.lo), hi: up(self.hi + o.hi) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CertifiedInterval { lo: down(self.lo - o.hi), hi: up(self.hi - o.lo) }
    }

    pub fn neg(&self) -> Self {
        CertifiedInterval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        CertifiedInterval { lo: down(lo), hi: up(hi) }
    }

    /// Division by an interval not containing zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.lo <= 0.0 && o.hi >= 0.0 {
            return None;
        }
        let p = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(CertifiedInterval { lo: down(lo), hi: up(hi) })
    }

    /// Square root of the non-negative part.
    pub fn sqrt(&self) -> Self {
        let lo = if self.lo <= 0.0 { 0.0 } else { down(self.lo.sqrt()).max(0.0) };
        let hi = if self.hi <= 0.0 { 0.0 } else { up(self.hi.sqrt()) };
        CertifiedInterval { lo, hi }
    }

    /// acosh on the part ≥ 1 (values below 1 are clamped, since callers
    /// only pass enclosures of quantities that are mathematically ≥ 1).
    pub fn acosh(&self) -> Self {
        let f = |x: f64| if x <= 1.0 { 0.0 } else { x.acosh() };
        CertifiedInterval { lo: pad_down(f(self.lo)).max(0.0), hi: pad_up(f(self.hi.max(1.0))) }
    }

    pub fn asinh(&self) -> Self {
        CertifiedInterval { lo: pad_down(self.lo.asinh()), hi: pad_up(self.hi.asinh()) }
    }

    pub fn cosh(&self) -> Self {
        let (a, b) = (self.lo.abs(), self.hi.abs());
        let lo = if self.lo <= 0.0 && self.hi >= 0.0 { 1.0 } else { a.min(b).cosh() };
        CertifiedInterval { lo: pad_down(lo).max(1.0), hi: pad_up(a.max(b).cosh()) }
    }

    pub fn exp(&self) -> Self {
        CertifiedInterval { lo: pad_down(self.lo.exp()).max(0.0), hi: pad_up(self.hi.exp()) }
    }

    pub fn ln(&self) -> Self {
        CertifiedInterval { lo: pad_down(self.lo.ln()), hi: pad_up(self.hi.ln()) }
    }

    pub fn max(&self, o: &Self) -> Self {
        CertifiedInterval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }
}

impl fmt::Debug for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for CertifiedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encloses_field_values() {
        let x: FieldScalar = "1/2√2 + √3 - 1/7".parse().unwrap();
        let v = 0.5 * 2f64.sqrt() + 3f64.sqrt() - 1.0 / 7.0;
        let i = CertifiedInterval::from_field(&x);
        assert!(i.contains(v) && i.width() < 1e-14);
    }

    #[test]
    fn transcendental_brackets() {
        let one = CertifiedInterval::point(1.0);
        assert!(one.acosh().contains(0.0));
        let two = CertifiedInterval::point(2.0);
        assert!(two.acosh().contains(1.3169578969248166));
        assert!(two.asinh().contains(1.4436354751788103));
        assert!(CertifiedInterval::point(1.0).cosh().contains(1.5430806348152437));
    }

    #[test]
    fn arithmetic_is_outward() {
        let a = CertifiedInterval::point(0.1);
        let b = CertifiedInterval::point(0.2);
        let s = a.add(&b);
        assert!(s.lo < 0.30000000000000004 && s.hi > 0.3);
        assert!(a.div(&CertifiedInterval::new(-1.0, 1.0)).is_none());
    }
}
