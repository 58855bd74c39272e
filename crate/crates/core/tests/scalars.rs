use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplex_embed::scalars::{CertifiedInterval, FieldScalar, Sign, RADICANDS};

fn basis(r: u32, j: usize) -> FieldScalar {
    let mut x = FieldScalar::sqrt_of(r as u64).unwrap();
    for _ in 0..j {
        x = &x * &FieldScalar::theta();
    }
    x
}

fn build(terms: &[(usize, usize, i64, i64)]) -> FieldScalar {
    let mut x = FieldScalar::zero();
    for &(r, j, n, d) in terms {
        x += &(&basis(RADICANDS[r], j) * &FieldScalar::from_ratio(n, d));
    }
    x
}

fn scalar(with_theta: bool) -> impl Strategy<Value = FieldScalar> {
    let j = if with_theta { 0..3usize } else { 0..1usize };
    prop::collection::vec((0..8usize, j, -20i64..20, 1i64..9), 0..5).prop_map(|t| build(&t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(a in scalar(true), b in scalar(true), c in scalar(true)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert_eq!(&a * &FieldScalar::one(), a.clone());
    }

    #[test]
    fn inverses(a in scalar(true)) {
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        prop_assert!((&a * &inv).is_one());
        prop_assert_eq!(a.inverse().unwrap().inverse().unwrap(), a);
    }

    #[test]
    fn sign_is_multiplicative_and_ordered(a in scalar(true), b in scalar(true)) {
        let prod = (&a * &b).sign();
        let expect = match (a.sign(), b.sign()) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (x, y) if x == y => Sign::Positive,
            _ => Sign::Negative,
        };
        prop_assert_eq!(prod, expect);
        prop_assert_eq!(a.cmp_value(&b), (&a - &b).sign().to_ordering());
        prop_assert!(!(&a * &a).is_negative());
    }

    #[test]
    fn text_and_json_round_trip(a in scalar(true)) {
        prop_assert_eq!(a.to_string().parse::<FieldScalar>().unwrap(), a.clone());
        let j = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<FieldScalar>(&j).unwrap(), a);
    }

    #[test]
    fn interval_contains_value(a in scalar(true)) {
        let iv = CertifiedInterval::from_field(&a);
        let (lo, hi) = oracle_enclosure(&a);
        prop_assert!(BigRational::from_float(iv.lo).unwrap() <= lo);
        prop_assert!(BigRational::from_float(iv.hi).unwrap() >= hi);
    }
}

/// Enclosure of √r at `bits` bits from integer square roots.
fn sqrt_bounds(r: u32, bits: u32) -> (BigRational, BigRational) {
    let scale = BigInt::one() << bits;
    let n = BigInt::from(r) * &scale * &scale;
    let s = n.sqrt();
    let exact = &s * &s == n;
    let lo = BigRational::new(s.clone(), scale.clone());
    let hi = if exact { lo.clone() } else { BigRational::new(s + 1, scale) };
    (lo, hi)
}

/// θ = 2cos(2π/7) by bisection on x³ + x² − 2x − 1 over [1, 2].
fn theta_bounds(bits: u32) -> (BigRational, BigRational) {
    let f = |x: &BigRational| {
        let x2 = x * x;
        &x2 * x + &x2 - x * BigRational::from_integer(2.into()) - BigRational::one()
    };
    let (mut lo, mut hi) = (BigRational::one(), BigRational::from_integer(2.into()));
    let half = BigRational::new(1.into(), 2.into());
    for _ in 0..bits {
        let mid = (&lo + &hi) * &half;
        if f(&mid).is_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

type Bounds = Vec<(u32, usize, BigRational, BigRational)>;

/// Bounds on every basis element √r·θ^j at 256 bits.
fn basis_bounds() -> &'static Bounds {
    static B: OnceLock<Bounds> = OnceLock::new();
    B.get_or_init(|| {
        let (tlo, thi) = theta_bounds(256);
        let mut out = Vec::new();
        for r in RADICANDS {
            let (mut blo, mut bhi) = sqrt_bounds(r, 256);
            for j in 0..3 {
                out.push((r, j, blo.clone(), bhi.clone()));
                blo = &blo * &tlo;
                bhi = &bhi * &thi;
            }
        }
        out
    })
}

fn oracle_enclosure(x: &FieldScalar) -> (BigRational, BigRational) {
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for (r, j, c) in x.terms() {
        let (_, _, blo, bhi) = basis_bounds().iter().find(|b| b.0 == r && b.1 == j).unwrap();
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

fn random_scalar(rng: &mut ChaCha8Rng) -> FieldScalar {
    let n = rng.gen_range(1..6);
    let t: Vec<_> = (0..n)
        .map(|_| (rng.gen_range(0..8), rng.gen_range(0..3), rng.gen_range(-50..50), rng.gen_range(1..12)))
        .collect();
    build(&t)
}

#[test]
fn signs_agree_with_high_precision_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut decided, mut zeros) = (0, 0);
    for k in 0..10_000 {
        let y = random_scalar(&mut rng);
        // every third sample is pushed close to zero by subtracting a
        // dyadic approximation of itself
        let x = if k % 3 == 0 {
            let e: u32 = rng.gen_range(8..48);
            let approx = (y.to_f64() * 2f64.powi(e as i32)).round();
            &y - &FieldScalar::from_rational(BigRational::new(BigInt::from(approx as i64), BigInt::one() << e))
        } else if k % 97 == 0 {
            &y - &y
        } else {
            y
        };
        let s = x.sign();
        if x.is_zero() {
            assert_eq!(s, Sign::Zero);
            zeros += 1;
            continue;
        }
        let (lo, hi) = oracle_enclosure(&x);
        if lo.is_positive() {
            assert_eq!(s, Sign::Positive, "{x}");
            decided += 1;
        } else if hi.is_negative() {
            assert_eq!(s, Sign::Negative, "{x}");
            decided += 1;
        } else {
            assert_ne!(s, Sign::Zero, "{x}");
        }
    }
    assert!(decided > 9_500, "oracle decided only {decided}");
    assert!(zeros > 50);
}

#[test]
fn field_sign_examples() {
    assert_eq!(FieldScalar::zero().sign(), Sign::Zero);
    let s2 = FieldScalar::sqrt_of(2).unwrap();
    let s3 = FieldScalar::sqrt_of(3).unwrap();
    assert_eq!((&s2 - &FieldScalar::one()).sign(), Sign::Positive);
    assert_eq!((&(&FieldScalar::from_integer(3) - &s2) - &s3).sign(), Sign::Negative);
}

#[test]
fn cosines_have_the_right_squares() {
    // 4cos²(π/m) is 1, 2, (3+√5)/2, 3 for m = 3, 4, 5, 6
    let four = FieldScalar::from_integer(4);
    let c = |m| FieldScalar::cos_pi_over(m).unwrap();
    assert_eq!(&four * &c(3).square(), FieldScalar::one());
    assert_eq!(&four * &c(4).square(), FieldScalar::from_integer(2));
    let phi2 = &(&FieldScalar::from_integer(3) + &FieldScalar::sqrt_of(5).unwrap()) * &FieldScalar::from_ratio(1, 2);
    assert_eq!(&four * &c(5).square(), phi2);
    assert_eq!(&four * &c(6).square(), FieldScalar::from_integer(3));
    // cos(π/7) is a root of 8x³ − 4x² − 4x + 1
    let x = c(7);
    let p = &(&(&FieldScalar::from_integer(8) * &(&x.square() * &x)) - &(&FieldScalar::from_integer(4) * &x.square()))
        - &(&FieldScalar::from_integer(4) * &x);
    assert!((&p + &FieldScalar::one()).is_zero());
    assert!((c(7).to_f64() - (std::f64::consts::PI / 7.0).cos()).abs() < 1e-12);
}
