use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{not_a_unit, ElementClass, Ring, RingDescriptor};
use crate::error::{Error, Result};

/// Largest modulus whose carrier is enumerated for exhaustive searches.
const ENUMERATION_LIMIT: u64 = 1 << 20;

/// The residue ring ℤ/mℤ with canonical representatives in [0, m).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zmod {
    m: u64,
}

impl Zmod {
    pub fn new(m: u64) -> Result<Self> {
        RingDescriptor::Modular { m }.validate()?;
        Ok(Zmod { m })
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn residue(&self, v: i64) -> u64 {
        v.rem_euclid(self.m as i64) as u64
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        v.mod_floor(&BigInt::from(self.m)).to_u64().expect("residue fits")
    }

    fn is_prime(&self) -> bool {
        let m = self.m;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                return false;
            }
            p += 1;
        }
        true
    }
}

impl Ring for Zmod {
    type Elem = u64;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Modular { m: self.m }
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_i64(&self, v: i64) -> u64 {
        self.residue(v)
    }

    fn from_bigint(&self, v: &BigInt) -> u64 {
        self.reduce_big(v)
    }

    fn from_rational(&self, q: &BigRational) -> Result<u64> {
        let num = self.reduce_big(q.numer());
        let den = self.reduce_big(q.denom());
        Ok(self.mul(&num, &self.inverse(&den)?))
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.m as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.m - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.m as u128) as u64
    }

    fn classify(&self, a: &u64) -> ElementClass {
        if *a == 0 {
            ElementClass::Zero
        } else if a.gcd(&self.m) == 1 {
            ElementClass::Unit
        } else {
            ElementClass::ZeroDivisor
        }
    }

    fn inverse(&self, a: &u64) -> Result<u64> {
        let ext = (*a as i128).extended_gcd(&(self.m as i128));
        if ext.gcd != 1 {
            return Err(not_a_unit(self, a, format!("gcd({a}, {}) = {}", self.m, ext.gcd)));
        }
        Ok(ext.x.rem_euclid(self.m as i128) as u64)
    }

    fn sqrt(&self, a: &u64) -> Result<u64> {
        if self.m <= ENUMERATION_LIMIT {
            if let Some(r) = (0..self.m).find(|r| self.mul(r, r) == *a) {
                return Ok(r);
            }
        }
        Err(Error::NoSquareRoot(a.to_string()))
    }

    fn elements(&self) -> Option<Vec<u64>> {
        (self.m <= ENUMERATION_LIMIT).then(|| (0..self.m).collect())
    }

    fn is_field(&self) -> bool {
        self.is_prime()
    }

    fn format(&self, a: &u64) -> String {
        a.to_string()
    }

    fn to_json(&self, a: &u64) -> serde_json::Value {
        serde_json::Value::from(*a)
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<u64> {
        self.from_rational(&super::json_to_rational(v)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_and_inverses() {
        let z8 = Zmod::new(8).unwrap();
        assert_eq!(z8.add(&6, &6), 4);
        let z7 = Zmod::new(7).unwrap();
        assert_eq!(z7.inverse(&3).unwrap(), 5);
        assert_eq!(z7.inverse(&z7.from_i64(12)).unwrap(), 3);
        let z18 = Zmod::new(18).unwrap();
        assert_eq!(z18.classify(&4), ElementClass::ZeroDivisor);
        match z18.inverse(&4) {
            Err(Error::NotAUnit { witness, .. }) => assert_eq!(witness, "gcd(4, 18) = 2"),
            other => panic!("unexpected {other:?}"),
        }
        let z17 = Zmod::new(17).unwrap();
        assert_eq!(z17.classify(&z17.from_i64(-2)), ElementClass::Unit);
        assert_eq!(z7.parse_json(&serde_json::json!("1/2")).unwrap(), 4);
        assert!(Zmod::new(1).is_err());
    }
}
