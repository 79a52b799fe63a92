//! Concrete commutative rings behind one arithmetic interface.
//!
//! Algorithms are written against [`Ring`], whose elements are plain values; the
//! ring object carries everything else (modulus, grid, tolerance). [`DynRing`]
//! wraps every supported kind behind a single runtime type for the CLI.

mod boolean;
mod descriptor;
mod dynamic;
mod float;
mod integer;
mod modular;
mod quadratic;
mod rational;
pub mod roots;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};

pub use boolean::BooleanRing;
pub use descriptor::RingDescriptor;
pub use dynamic::{
    ring_add, ring_inverse, ring_mul, ring_neg, ring_one, ring_sub, ring_zero, DynRing, Payload,
    RingValue,
};
pub use float::{RealField, SampledFunctions};
pub use integer::Integers;
pub use modular::Zmod;
pub use quadratic::{Quad, QuadraticField};
pub use rational::Rationals;

/// Multiplicative status of a ring element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementClass {
    Zero,
    Unit,
    ZeroDivisor,
    NonUnitRegular,
    Undecidable,
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ElementClass::Zero => "zero",
            ElementClass::Unit => "a unit",
            ElementClass::ZeroDivisor => "a zero divisor",
            ElementClass::NonUnitRegular => "a regular non-unit",
            ElementClass::Undecidable => "undecidable",
        };
        f.write_str(s)
    }
}

/// A commutative ring together with its exact (or tolerance-based) arithmetic.
pub trait Ring: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    fn descriptor(&self) -> RingDescriptor;

    fn zero(&self) -> Self::Elem;

    /// Multiplicative identity. Every supported kind has one.
    fn one(&self) -> Self::Elem;

    fn has_identity(&self) -> bool {
        true
    }

    fn try_one(&self) -> Result<Self::Elem> {
        if self.has_identity() {
            Ok(self.one())
        } else {
            Err(Error::NoIdentity)
        }
    }

    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(v))
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem;

    /// Image of a rational number, when the denominator is invertible in the ring.
    fn from_rational(&self, q: &BigRational) -> Result<Self::Elem>;

    /// Exact rational value of an element, for kinds embedded in the rationals.
    fn to_rational(&self, _a: &Self::Elem) -> Option<BigRational> {
        None
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// Equality; exact for exact kinds, relative tolerance for float kinds.
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a == b
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.equal(a, &self.zero())
    }

    fn classify(&self, a: &Self::Elem) -> ElementClass;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.classify(a) == ElementClass::Unit
    }

    fn inverse(&self, a: &Self::Elem) -> Result<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inverse(b)?))
    }

    fn sqrt(&self, a: &Self::Elem) -> Result<Self::Elem> {
        Err(Error::NoSquareRoot(self.format(a)))
    }

    /// All elements, for finite carriers small enough to enumerate.
    fn elements(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn is_field(&self) -> bool;

    /// Total order, for ordered kinds only.
    fn compare(&self, _a: &Self::Elem, _b: &Self::Elem) -> Option<Ordering> {
        None
    }

    /// Real sample values (one per grid point) for float kinds.
    fn real_samples(&self, _a: &Self::Elem) -> Option<Vec<f64>> {
        None
    }

    /// Element with the given per-point real values; float kinds only.
    fn from_samples(&self, _xs: &[f64]) -> Result<Self::Elem> {
        Err(Error::Type(format!(
            "sample vectors are not elements of {}",
            self.descriptor()
        )))
    }

    /// Apply a real function pointwise; float kinds only.
    fn map_real(&self, _a: &Self::Elem, _f: &dyn Fn(f64) -> f64) -> Result<Self::Elem> {
        Err(Error::Type(format!(
            "real functions are not available over {}",
            self.descriptor()
        )))
    }

    /// Embed a real constant; float kinds only.
    fn real_constant(&self, _x: f64) -> Result<Self::Elem> {
        Err(Error::Type(format!(
            "real constants are not available over {}",
            self.descriptor()
        )))
    }

    /// The identity function s on the grid; sampled kinds only.
    fn variable_s(&self) -> Result<Self::Elem> {
        Err(Error::Type(format!(
            "variable s is only defined over sampled rings, not {}",
            self.descriptor()
        )))
    }

    /// Canonical text form ("3/2", "1+1*sqrt(2)", "{1,3}", 12 significant digits).
    fn format(&self, a: &Self::Elem) -> String;

    fn to_json(&self, a: &Self::Elem) -> serde_json::Value;

    fn parse_json(&self, v: &serde_json::Value) -> Result<Self::Elem>;

    /// a^e for e ≥ 1 without touching the identity; e = 0 returns one().
    fn pow(&self, a: &Self::Elem, e: u64) -> Self::Elem {
        if e == 0 {
            return self.one();
        }
        pow_positive(self, a, e)
    }
}

/// a^e for e ≥ 1 by repeated squaring; never calls `one()`.
pub fn pow_positive<R: Ring + ?Sized>(ring: &R, a: &R::Elem, e: u64) -> R::Elem {
    assert!(e >= 1, "pow_positive needs a positive exponent");
    let mut base = a.clone();
    let mut e = e;
    let mut acc: Option<R::Elem> = None;
    while e > 0 {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(x) => ring.mul(&x, &base),
            });
        }
        e >>= 1;
        if e > 0 {
            base = ring.mul(&base, &base);
        }
    }
    acc.expect("exponent is positive")
}

/// Sum of a slice; the empty sum is zero.
pub fn sum<R: Ring + ?Sized>(ring: &R, xs: &[R::Elem]) -> R::Elem {
    xs.iter().fold(ring.zero(), |acc, x| ring.add(&acc, x))
}

/// Product of a nonempty slice.
pub fn product<R: Ring + ?Sized>(ring: &R, xs: &[R::Elem]) -> R::Elem {
    let mut it = xs.iter();
    let first = it.next().expect("product of an empty list").clone();
    it.fold(first, |acc, x| ring.mul(&acc, x))
}

/// Absolute value in an ordered ring.
pub fn abs<R: Ring + ?Sized>(ring: &R, a: &R::Elem) -> Result<R::Elem> {
    match ring.compare(a, &ring.zero()) {
        Some(Ordering::Less) => Ok(ring.neg(a)),
        Some(_) => Ok(a.clone()),
        None => Err(Error::Type(format!(
            "{} is not an ordered ring",
            ring.descriptor()
        ))),
    }
}

pub(crate) fn not_a_unit<R: Ring + ?Sized>(ring: &R, a: &R::Elem, witness: impl Into<String>) -> Error {
    Error::NotAUnit {
        value: ring.format(a),
        witness: witness.into(),
    }
}

pub(crate) fn json_to_rational(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                parse_rational(&n.to_string())
            }
        }
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::InvalidValue(format!("expected a number, got {other}"))),
    }
}

/// Parse "7", "-3/4" or a plain decimal such as "0.25" exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidValue(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den == BigInt::from(0) {
            return Err(Error::InvalidValue(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    parse_decimal(s).ok_or_else(bad)
}

/// Exact value of a decimal literal with optional exponent.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = if digits.is_empty() { BigInt::from(0) } else { digits.parse().ok()? };
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Some(q)
}

pub(crate) fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
