use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{not_a_unit, ElementClass, Ring, RingDescriptor};
use crate::error::{Error, Result};

/// The integers ℤ with arbitrary precision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Integer
    }

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }

    fn one(&self) -> BigInt {
        BigInt::one()
    }

    fn from_bigint(&self, v: &BigInt) -> BigInt {
        v.clone()
    }

    fn from_rational(&self, q: &BigRational) -> Result<BigInt> {
        if q.is_integer() {
            Ok(q.to_integer())
        } else {
            Err(Error::InvalidValue(format!("{q} is not an integer")))
        }
    }

    fn to_rational(&self, a: &BigInt) -> Option<BigRational> {
        Some(BigRational::from_integer(a.clone()))
    }

    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }

    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }

    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }

    fn classify(&self, a: &BigInt) -> ElementClass {
        if a.is_zero() {
            ElementClass::Zero
        } else if a.abs().is_one() {
            ElementClass::Unit
        } else {
            ElementClass::NonUnitRegular
        }
    }

    fn inverse(&self, a: &BigInt) -> Result<BigInt> {
        if a.abs().is_one() {
            Ok(a.clone())
        } else {
            Err(not_a_unit(self, a, "the only integer units are 1 and -1"))
        }
    }

    fn sqrt(&self, a: &BigInt) -> Result<BigInt> {
        if !a.is_negative() {
            let r = a.sqrt();
            if &r * &r == *a {
                return Ok(r);
            }
        }
        Err(Error::NoSquareRoot(a.to_string()))
    }

    fn is_field(&self) -> bool {
        false
    }

    fn compare(&self, a: &BigInt, b: &BigInt) -> Option<Ordering> {
        Some(a.cmp(b))
    }

    fn format(&self, a: &BigInt) -> String {
        a.to_string()
    }

    fn to_json(&self, a: &BigInt) -> serde_json::Value {
        match i64::try_from(a) {
            Ok(v) => serde_json::Value::from(v),
            Err(_) => serde_json::Value::String(a.to_string()),
        }
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<BigInt> {
        self.from_rational(&super::json_to_rational(v)?)
    }
}
