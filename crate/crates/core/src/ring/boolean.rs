use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use super::{json_to_rational, not_a_unit, ElementClass, Ring, RingDescriptor};
use crate::error::{Error, Result};

/// Largest universe whose power set is enumerated for exhaustive searches.
const ENUMERATION_LIMIT: u32 = 20;

/// Subsets of a fixed finite universe: addition is symmetric difference,
/// multiplication is intersection, the identity is the whole universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BooleanRing {
    universe: u32,
}

impl BooleanRing {
    pub fn new(universe: u32) -> Result<Self> {
        RingDescriptor::Boolean { universe }.validate()?;
        Ok(BooleanRing { universe })
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    fn full(&self) -> u128 {
        if self.universe == 128 {
            u128::MAX
        } else {
            (1u128 << self.universe) - 1
        }
    }

    /// The subset with the given members.
    pub fn set(&self, members: &[u32]) -> Result<u128> {
        members.iter().try_fold(0u128, |acc, &i| {
            if i < self.universe {
                Ok(acc | (1u128 << i))
            } else {
                Err(Error::InvalidValue(format!(
                    "element {i} is outside the universe of size {}",
                    self.universe
                )))
            }
        })
    }

    pub fn members(&self, a: &u128) -> Vec<u32> {
        (0..self.universe).filter(|i| a >> i & 1 == 1).collect()
    }
}

impl Ring for BooleanRing {
    type Elem = u128;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Boolean { universe: self.universe }
    }

    fn zero(&self) -> u128 {
        0
    }

    fn one(&self) -> u128 {
        self.full()
    }

    fn from_bigint(&self, v: &BigInt) -> u128 {
        if v.is_odd() {
            self.full()
        } else {
            0
        }
    }

    fn from_rational(&self, q: &BigRational) -> Result<u128> {
        if q.denom().is_even() {
            return Err(Error::InvalidValue(format!("{q} has no image in a Boolean ring")));
        }
        Ok(self.from_bigint(q.numer()))
    }

    fn add(&self, a: &u128, b: &u128) -> u128 {
        a ^ b
    }

    fn neg(&self, a: &u128) -> u128 {
        *a
    }

    fn mul(&self, a: &u128, b: &u128) -> u128 {
        a & b
    }

    fn classify(&self, a: &u128) -> ElementClass {
        if a.is_zero() {
            ElementClass::Zero
        } else if *a == self.full() {
            ElementClass::Unit
        } else {
            ElementClass::ZeroDivisor
        }
    }

    fn inverse(&self, a: &u128) -> Result<u128> {
        if *a == self.full() {
            Ok(*a)
        } else {
            let complement = self.full() & !a;
            Err(not_a_unit(self, a, format!("annihilated by {}", self.format(&complement))))
        }
    }

    fn sqrt(&self, a: &u128) -> Result<u128> {
        Ok(*a)
    }

    fn elements(&self) -> Option<Vec<u128>> {
        (self.universe <= ENUMERATION_LIMIT).then(|| (0..=self.full()).collect())
    }

    fn is_field(&self) -> bool {
        self.universe == 1
    }

    fn format(&self, a: &u128) -> String {
        let items: Vec<String> = self.members(a).iter().map(|i| i.to_string()).collect();
        format!("{{{}}}", items.join(","))
    }

    fn to_json(&self, a: &u128) -> serde_json::Value {
        serde_json::Value::from(self.members(a))
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<u128> {
        match v {
            serde_json::Value::Array(items) => {
                let members = items
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .and_then(|i| u32::try_from(i).ok())
                            .ok_or_else(|| Error::InvalidValue(format!("bad set member {x}")))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                self.set(&members)
            }
            other => self.from_rational(&json_to_rational(other)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_difference_and_intersection() {
        let b = BooleanRing::new(16).unwrap();
        let x = b.set(&[1, 2]).unwrap();
        let y = b.set(&[2, 3]).unwrap();
        assert_eq!(b.add(&x, &y), b.set(&[1, 3]).unwrap());
        assert_eq!(b.mul(&x, &y), b.set(&[2]).unwrap());
        assert_eq!(b.format(&b.add(&x, &y)), "{1,3}");
        assert_eq!(b.classify(&x), ElementClass::ZeroDivisor);
        assert_eq!(b.classify(&b.one()), ElementClass::Unit);
        assert_eq!(b.parse_json(&serde_json::json!([3, 1])).unwrap(), b.set(&[1, 3]).unwrap());
        assert!(b.set(&[16]).is_err());
        assert_eq!(BooleanRing::new(128).unwrap().one(), u128::MAX);
    }
}
