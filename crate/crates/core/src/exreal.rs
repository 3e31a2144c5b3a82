//! Exact extended non-negative rationals and finite signed rationals.
//!
//! [`ExtValue`] is the codomain of valuations and of lower semicontinuous
//! functions: a non-negative rational or `inf`. Multiplication follows the
//! convention `0 * inf = inf * 0 = 0`. There is no subtraction on
//! [`ExtValue`]; signed quantities are [`SignedRational`], which is always
//! finite.
//!
//! Both types render as `p/q` (integers without the `/q`, infinity as
//! `inf`) and parse the same grammar, so `to_string` and `parse` round-trip
//! exactly.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("value {0} is negative")]
    Negative(String),
    #[error("cannot parse {0:?} as an exact rational")]
    Parse(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("infinity has no finite signed representation")]
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Finite(BigRational),
    Infinity,
}

/// An element of `Q+ ∪ {inf}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtValue(Repr);

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue(Repr::Finite(BigRational::zero()))
    }

    pub fn one() -> Self {
        ExtValue(Repr::Finite(BigRational::one()))
    }

    pub fn infinity() -> Self {
        ExtValue(Repr::Infinity)
    }

    pub fn from_integer(n: u64) -> Self {
        ExtValue(Repr::Finite(BigRational::from_integer(BigInt::from(n))))
    }

    /// `numer / denom`. Panics if `denom == 0`.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        ExtValue(Repr::Finite(BigRational::new(BigInt::from(numer), BigInt::from(denom))))
    }

    pub fn from_rational(value: BigRational) -> Result<Self, NumberError> {
        if value.is_negative() {
            return Err(NumberError::Negative(render_rational(&value)));
        }
        Ok(ExtValue(Repr::Finite(value)))
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Finite(r) if r.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.0, Repr::Infinity)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_infinite()
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Finite(r) => Some(r),
            Repr::Infinity => None,
        }
    }

    pub fn to_signed(&self) -> Result<SignedRational, NumberError> {
        self.finite()
            .map(|r| SignedRational(r.clone()))
            .ok_or(NumberError::Infinite)
    }
}

impl Default for ExtValue {
    fn default() -> Self {
        ExtValue::zero()
    }
}

impl Ord for ExtValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Finite(a), Repr::Finite(b)) => a.cmp(b),
            (Repr::Finite(_), Repr::Infinity) => Ordering::Less,
            (Repr::Infinity, Repr::Finite(_)) => Ordering::Greater,
            (Repr::Infinity, Repr::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a ExtValue> for &ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: &'a ExtValue) -> ExtValue {
        match (&self.0, &rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtValue(Repr::Finite(a + b)),
            _ => ExtValue::infinity(),
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        &self + &rhs
    }
}

impl<'a> Mul<&'a ExtValue> for &ExtValue {
    type Output = ExtValue;

    fn mul(self, rhs: &'a ExtValue) -> ExtValue {
        if self.is_zero() || rhs.is_zero() {
            return ExtValue::zero();
        }
        match (&self.0, &rhs.0) {
            (Repr::Finite(a), Repr::Finite(b)) => ExtValue(Repr::Finite(a * b)),
            _ => ExtValue::infinity(),
        }
    }
}

impl Mul for ExtValue {
    type Output = ExtValue;

    fn mul(self, rhs: ExtValue) -> ExtValue {
        &self * &rhs
    }
}

impl Sum for ExtValue {
    fn sum<I: Iterator<Item = ExtValue>>(iter: I) -> Self {
        iter.fold(ExtValue::zero(), |acc, x| &acc + &x)
    }
}

impl<'a> Sum<&'a ExtValue> for ExtValue {
    fn sum<I: Iterator<Item = &'a ExtValue>>(iter: I) -> Self {
        iter.fold(ExtValue::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Finite(r) => f.write_str(&render_rational(r)),
            Repr::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtValue {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(ExtValue::infinity());
        }
        if s.starts_with('-') {
            return Err(NumberError::Negative(s.to_string()));
        }
        parse_rational(s).map(|r| ExtValue(Repr::Finite(r)))
    }
}

/// A finite rational of either sign.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SignedRational(BigRational);

impl SignedRational {
    pub fn new(value: BigRational) -> Self {
        SignedRational(value)
    }

    pub fn zero() -> Self {
        SignedRational(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        SignedRational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`. Panics if `denom == 0`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        SignedRational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn scale(&self, factor: &SignedRational) -> SignedRational {
        SignedRational(&self.0 * &factor.0)
    }

    /// The value as an [`ExtValue`], if it is non-negative.
    pub fn to_ext(&self) -> Option<ExtValue> {
        ExtValue::from_rational(self.0.clone()).ok()
    }
}

impl From<BigRational> for SignedRational {
    fn from(value: BigRational) -> Self {
        SignedRational(value)
    }
}

impl<'a> Add<&'a SignedRational> for &SignedRational {
    type Output = SignedRational;

    fn add(self, rhs: &'a SignedRational) -> SignedRational {
        SignedRational(&self.0 + &rhs.0)
    }
}

impl Add for SignedRational {
    type Output = SignedRational;

    fn add(self, rhs: SignedRational) -> SignedRational {
        SignedRational(self.0 + rhs.0)
    }
}

impl<'a> Sub<&'a SignedRational> for &SignedRational {
    type Output = SignedRational;

    fn sub(self, rhs: &'a SignedRational) -> SignedRational {
        SignedRational(&self.0 - &rhs.0)
    }
}

impl Sub for SignedRational {
    type Output = SignedRational;

    fn sub(self, rhs: SignedRational) -> SignedRational {
        SignedRational(self.0 - rhs.0)
    }
}

impl<'a> Mul<&'a SignedRational> for &SignedRational {
    type Output = SignedRational;

    fn mul(self, rhs: &'a SignedRational) -> SignedRational {
        SignedRational(&self.0 * &rhs.0)
    }
}

impl Mul for SignedRational {
    type Output = SignedRational;

    fn mul(self, rhs: SignedRational) -> SignedRational {
        SignedRational(self.0 * rhs.0)
    }
}

impl Neg for SignedRational {
    type Output = SignedRational;

    fn neg(self) -> SignedRational {
        SignedRational(-self.0)
    }
}

impl Neg for &SignedRational {
    type Output = SignedRational;

    fn neg(self) -> SignedRational {
        SignedRational(-&self.0)
    }
}

impl Sum for SignedRational {
    fn sum<I: Iterator<Item = SignedRational>>(iter: I) -> Self {
        iter.fold(SignedRational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a SignedRational> for SignedRational {
    fn sum<I: Iterator<Item = &'a SignedRational>>(iter: I) -> Self {
        iter.fold(SignedRational::zero(), |acc, x| &acc + x)
    }
}

impl fmt::Display for SignedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_rational(&self.0))
    }
}

impl FromStr for SignedRational {
    type Err = NumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_prefix('-') {
            Some(rest) if !rest.starts_with('-') => parse_rational(rest).map(|r| SignedRational(-r)),
            Some(_) => Err(NumberError::Parse(s.to_string())),
            None => parse_rational(s).map(SignedRational),
        }
    }
}

fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_digits(s: &str, whole: &str) -> Result<BigInt, NumberError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NumberError::Parse(whole.to_string()));
    }
    s.parse::<BigInt>().map_err(|_| NumberError::Parse(whole.to_string()))
}

/// Unsigned `digits` or `digits/digits`.
fn parse_rational(s: &str) -> Result<BigRational, NumberError> {
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_digits(s, s)?)),
        Some((n, d)) => {
            let numer = parse_digits(n, s)?;
            let denom = parse_digits(d, s)?;
            if denom.is_zero() {
                return Err(NumberError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(numer, denom))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(s: &str) -> ExtValue {
        s.parse().unwrap()
    }

    fn sr(s: &str) -> SignedRational {
        s.parse().unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(ev("1/2") + ev("1/3"), ev("5/6"));
        assert_eq!(ExtValue::infinity() + ev("5"), ExtValue::infinity());
        assert_eq!(ev("0") + ev("0"), ExtValue::zero());
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(ExtValue::zero() * ExtValue::infinity(), ExtValue::zero());
        assert_eq!(ExtValue::infinity() * ExtValue::zero(), ExtValue::zero());
        assert_eq!(ev("2") * ev("3"), ev("6"));
        assert_eq!(ExtValue::infinity() * ev("1/2"), ExtValue::infinity());
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(ev("3/2").cmp(&ExtValue::infinity()), Ordering::Less);
        assert_eq!(ev("2/4").cmp(&ev("1/2")), Ordering::Equal);
        assert_eq!(ev("7/3").cmp(&ev("2")), Ordering::Greater);
    }

    #[test]
    fn signed_examples() {
        assert_eq!(sr("1/2") - sr("3/2"), sr("-1"));
        assert_eq!(-SignedRational::zero(), SignedRational::zero());
        assert_eq!(sr("1/3") * sr("-3/5"), sr("-1/5"));
        assert!(sr("-1/5") < SignedRational::zero());
    }

    #[test]
    fn rendering() {
        assert_eq!(ev("2/4").to_string(), "1/2");
        assert_eq!(ev("6/3").to_string(), "2");
        assert_eq!(ExtValue::infinity().to_string(), "inf");
        assert_eq!(sr("-0").to_string(), "0");
        assert_eq!(sr("-4/6").to_string(), "-2/3");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "-1", "1/0", "a", "1/", "/2", "1.5", "+1", " 1", "1/-2", "infinity"] {
            assert!(bad.parse::<ExtValue>().is_err(), "{bad:?}");
        }
        for bad in ["--1", "inf", "-", "1/0"] {
            assert!(bad.parse::<SignedRational>().is_err(), "{bad:?}");
        }
        assert!(matches!(
            ExtValue::from_rational(sr("-1").into_inner()),
            Err(NumberError::Negative(_))
        ));
    }

    fn ext() -> impl Strategy<Value = ExtValue> {
        prop_oneof![
            1 => Just(ExtValue::infinity()),
            1 => Just(ExtValue::zero()),
            6 => (0u64..50, 1u64..12).prop_map(|(n, d)| ExtValue::ratio(n, d)),
        ]
    }

    fn signed() -> impl Strategy<Value = SignedRational> {
        (-50i64..50, 1i64..12).prop_map(|(n, d)| SignedRational::ratio(n, d))
    }

    proptest! {
        #[test]
        fn add_mul_are_commutative_and_associative(a in ext(), b in ext(), c in ext()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn mul_distributes_over_add(a in ext(), b in ext(), c in ext()) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn order_is_total_and_ops_monotone(a in ext(), b in ext(), c in ext()) {
            prop_assert!(a <= b || b <= a);
            if a <= b {
                prop_assert!(&a + &c <= &b + &c);
                prop_assert!(&a * &c <= &b * &c);
            }
            prop_assert!(a <= ExtValue::infinity());
        }

        #[test]
        fn text_round_trips(a in ext(), s in signed()) {
            prop_assert_eq!(a.to_string().parse::<ExtValue>().unwrap(), a.clone());
            prop_assert_eq!(a.to_string().parse::<ExtValue>().unwrap().to_string(), a.to_string());
            prop_assert_eq!(s.to_string().parse::<SignedRational>().unwrap(), s);
        }

        #[test]
        fn signed_field_laws(a in signed(), b in signed(), c in signed()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a - &a, SignedRational::zero());
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(-(-a.clone()), a);
        }
    }
}
