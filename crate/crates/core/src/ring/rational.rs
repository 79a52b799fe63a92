use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{format_rational, not_a_unit, ElementClass, Ring, RingDescriptor};
use crate::error::{Error, Result};

/// The rationals ℚ; values are kept in lowest terms with positive denominator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rationals;

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub(crate) fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &rn * &rn == *n && &rd * &rd == *d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

impl Ring for Rationals {
    type Elem = BigRational;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Rational
    }

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn from_bigint(&self, v: &BigInt) -> BigRational {
        BigRational::from_integer(v.clone())
    }

    fn from_rational(&self, q: &BigRational) -> Result<BigRational> {
        Ok(q.clone())
    }

    fn to_rational(&self, a: &BigRational) -> Option<BigRational> {
        Some(a.clone())
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn classify(&self, a: &BigRational) -> ElementClass {
        if a.is_zero() {
            ElementClass::Zero
        } else {
            ElementClass::Unit
        }
    }

    fn inverse(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Err(not_a_unit(self, a, "zero has no reciprocal"))
        } else {
            Ok(a.recip())
        }
    }

    fn sqrt(&self, a: &BigRational) -> Result<BigRational> {
        rational_sqrt(a).ok_or_else(|| Error::NoSquareRoot(format_rational(a)))
    }

    fn is_field(&self) -> bool {
        true
    }

    fn compare(&self, a: &BigRational, b: &BigRational) -> Option<Ordering> {
        Some(a.cmp(b))
    }

    fn format(&self, a: &BigRational) -> String {
        format_rational(a)
    }

    fn to_json(&self, a: &BigRational) -> serde_json::Value {
        if a.is_integer() {
            if let Ok(v) = i64::try_from(a.numer()) {
                return serde_json::Value::from(v);
            }
        }
        serde_json::Value::String(format_rational(a))
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<BigRational> {
        super::json_to_rational(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_is_canonical() {
        let r = Rationals;
        assert_eq!(r.mul(&q(2, 3), &q(3, 4)), q(1, 2));
        assert_eq!(r.format(&q(6, -4)), "-3/2");
        assert_eq!(r.sqrt(&q(9, 4)).unwrap(), q(3, 2));
        assert!(r.sqrt(&q(2, 1)).is_err());
        assert!(matches!(r.inverse(&q(0, 1)), Err(Error::NotAUnit { .. })));
        assert_eq!(r.parse_json(&serde_json::json!("3/2")).unwrap(), q(3, 2));
        assert_eq!(r.to_json(&q(3, 2)), serde_json::json!("3/2"));
        assert_eq!(r.to_json(&q(4, 2)), serde_json::json!(2));
    }
}
