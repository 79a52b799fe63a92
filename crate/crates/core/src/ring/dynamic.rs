use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{
    BooleanRing, ElementClass, Integers, Quad, QuadraticField, Rationals, RealField, Ring,
    RingDescriptor, SampledFunctions, Zmod,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum AnyRing {
    Integer(Integers),
    Rational(Rationals),
    Modular(Zmod),
    Quadratic(QuadraticField),
    Boolean(BooleanRing),
    Sampled(SampledFunctions<f64>),
    Real(RealField<f64>),
}

/// Kind-specific representation of a [`RingValue`].
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Integer(BigInt),
    Rational(BigRational),
    Modular(u64),
    Quadratic(Quad),
    Boolean(u128),
    Sampled(Vec<f64>),
    Real(f64),
}

trait Embed: Ring {
    fn wrap(e: Self::Elem) -> Payload;
    fn unwrap(p: &Payload) -> &Self::Elem;
}

macro_rules! embed {
    ($ring:ty, $variant:ident) => {
        impl Embed for $ring {
            fn wrap(e: Self::Elem) -> Payload {
                Payload::$variant(e)
            }
            fn unwrap(p: &Payload) -> &Self::Elem {
                match p {
                    Payload::$variant(x) => x,
                    other => panic!("descriptor mismatch: {other:?} used in {}", stringify!($variant)),
                }
            }
        }
    };
}

embed!(Integers, Integer);
embed!(Rationals, Rational);
embed!(Zmod, Modular);
embed!(QuadraticField, Quadratic);
embed!(BooleanRing, Boolean);
embed!(SampledFunctions<f64>, Sampled);
embed!(RealField<f64>, Real);

macro_rules! dispatch {
    ($self:expr, $r:ident, $R:ident => $body:expr) => {
        match &*$self.inner {
            AnyRing::Integer($r) => { #[allow(dead_code)] type $R = Integers; $body }
            AnyRing::Rational($r) => { #[allow(dead_code)] type $R = Rationals; $body }
            AnyRing::Modular($r) => { #[allow(dead_code)] type $R = Zmod; $body }
            AnyRing::Quadratic($r) => { #[allow(dead_code)] type $R = QuadraticField; $body }
            AnyRing::Boolean($r) => { #[allow(dead_code)] type $R = BooleanRing; $body }
            AnyRing::Sampled($r) => { #[allow(dead_code)] type $R = SampledFunctions<f64>; $body }
            AnyRing::Real($r) => { #[allow(dead_code)] type $R = RealField<f64>; $body }
        }
    };
}

/// Any supported ring, selected at runtime from a [`RingDescriptor`].
#[derive(Debug, Clone, PartialEq)]
pub struct DynRing {
    inner: Arc<AnyRing>,
}

/// An element of a [`DynRing`]; it carries its ring so mixed-ring arithmetic is detectable.
#[derive(Debug, Clone, PartialEq)]
pub struct RingValue {
    ring: DynRing,
    payload: Payload,
}

impl RingValue {
    pub fn ring(&self) -> &DynRing {
        &self.ring
    }

    pub fn descriptor(&self) -> RingDescriptor {
        self.ring.descriptor()
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ring.format(self))
    }
}

impl DynRing {
    pub fn new(desc: &RingDescriptor) -> Result<Self> {
        desc.validate()?;
        let inner = match desc {
            RingDescriptor::Integer => AnyRing::Integer(Integers),
            RingDescriptor::Rational => AnyRing::Rational(Rationals),
            RingDescriptor::Modular { m } => AnyRing::Modular(Zmod::new(*m)?),
            RingDescriptor::QuadraticExt { d } => AnyRing::Quadratic(QuadraticField::new(*d)?),
            RingDescriptor::Boolean { universe } => AnyRing::Boolean(BooleanRing::new(*universe)?),
            RingDescriptor::Sampled { grid, tol } => AnyRing::Sampled(SampledFunctions::new(grid, *tol)?),
            RingDescriptor::Real { tol } => AnyRing::Real(RealField::new(*tol)?),
        };
        Ok(DynRing { inner: Arc::new(inner) })
    }

    fn value(&self, payload: Payload) -> RingValue {
        RingValue { ring: self.clone(), payload }
    }

    fn check(&self, v: &RingValue) -> Result<()> {
        if v.ring == *self {
            Ok(())
        } else {
            Err(mismatch(self, &v.ring))
        }
    }

    /// Parse a JSON value as an element of this ring.
    pub fn parse(&self, v: &serde_json::Value) -> Result<RingValue> {
        self.parse_json(v)
    }

    /// Build an element from its payload, rejecting payloads of another kind.
    pub fn from_payload(&self, payload: Payload) -> Result<RingValue> {
        let ok = matches!(
            (&*self.inner, &payload),
            (AnyRing::Integer(_), Payload::Integer(_))
                | (AnyRing::Rational(_), Payload::Rational(_))
                | (AnyRing::Modular(_), Payload::Modular(_))
                | (AnyRing::Quadratic(_), Payload::Quadratic(_))
                | (AnyRing::Boolean(_), Payload::Boolean(_))
                | (AnyRing::Sampled(_), Payload::Sampled(_))
                | (AnyRing::Real(_), Payload::Real(_))
        );
        if !ok {
            return Err(Error::DescriptorMismatch {
                left: self.descriptor().to_string(),
                right: format!("{payload:?}"),
            });
        }
        Ok(self.value(payload))
    }
}

fn mismatch(a: &DynRing, b: &DynRing) -> Error {
    Error::DescriptorMismatch {
        left: a.descriptor().to_string(),
        right: b.descriptor().to_string(),
    }
}

impl Ring for DynRing {
    type Elem = RingValue;

    fn descriptor(&self) -> RingDescriptor {
        dispatch!(self, r, R => r.descriptor())
    }

    fn zero(&self) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.zero())))
    }

    fn one(&self) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.one())))
    }

    fn from_i64(&self, v: i64) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.from_i64(v))))
    }

    fn from_bigint(&self, v: &BigInt) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.from_bigint(v))))
    }

    fn from_rational(&self, q: &BigRational) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.from_rational(q)?))))
    }

    fn to_rational(&self, a: &RingValue) -> Option<BigRational> {
        dispatch!(self, r, R => r.to_rational(R::unwrap(&a.payload)))
    }

    fn add(&self, a: &RingValue, b: &RingValue) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.add(R::unwrap(&a.payload), R::unwrap(&b.payload)))))
    }

    fn neg(&self, a: &RingValue) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.neg(R::unwrap(&a.payload)))))
    }

    fn mul(&self, a: &RingValue, b: &RingValue) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.mul(R::unwrap(&a.payload), R::unwrap(&b.payload)))))
    }

    fn sub(&self, a: &RingValue, b: &RingValue) -> RingValue {
        dispatch!(self, r, R => self.value(R::wrap(r.sub(R::unwrap(&a.payload), R::unwrap(&b.payload)))))
    }

    fn equal(&self, a: &RingValue, b: &RingValue) -> bool {
        dispatch!(self, r, R => r.equal(R::unwrap(&a.payload), R::unwrap(&b.payload)))
    }

    fn is_zero(&self, a: &RingValue) -> bool {
        dispatch!(self, r, R => r.is_zero(R::unwrap(&a.payload)))
    }

    fn classify(&self, a: &RingValue) -> ElementClass {
        dispatch!(self, r, R => r.classify(R::unwrap(&a.payload)))
    }

    fn inverse(&self, a: &RingValue) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.inverse(R::unwrap(&a.payload))?))))
    }

    fn sqrt(&self, a: &RingValue) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.sqrt(R::unwrap(&a.payload))?))))
    }

    fn elements(&self) -> Option<Vec<RingValue>> {
        dispatch!(self, r, R => r
            .elements()
            .map(|xs| xs.into_iter().map(|x| self.value(R::wrap(x))).collect()))
    }

    fn is_exact(&self) -> bool {
        dispatch!(self, r, R => r.is_exact())
    }

    fn is_field(&self) -> bool {
        dispatch!(self, r, R => r.is_field())
    }

    fn compare(&self, a: &RingValue, b: &RingValue) -> Option<Ordering> {
        dispatch!(self, r, R => r.compare(R::unwrap(&a.payload), R::unwrap(&b.payload)))
    }

    fn real_samples(&self, a: &RingValue) -> Option<Vec<f64>> {
        dispatch!(self, r, R => r.real_samples(R::unwrap(&a.payload)))
    }

    fn from_samples(&self, xs: &[f64]) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.from_samples(xs)?))))
    }

    fn map_real(&self, a: &RingValue, f: &dyn Fn(f64) -> f64) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.map_real(R::unwrap(&a.payload), f)?))))
    }

    fn real_constant(&self, x: f64) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.real_constant(x)?))))
    }

    fn variable_s(&self) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.variable_s()?))))
    }

    fn format(&self, a: &RingValue) -> String {
        dispatch!(self, r, R => r.format(R::unwrap(&a.payload)))
    }

    fn to_json(&self, a: &RingValue) -> serde_json::Value {
        dispatch!(self, r, R => r.to_json(R::unwrap(&a.payload)))
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<RingValue> {
        dispatch!(self, r, R => Ok(self.value(R::wrap(r.parse_json(v)?))))
    }
}

fn same(x: &RingValue, y: &RingValue) -> Result<()> {
    x.ring.check(y)
}

pub fn ring_add(x: &RingValue, y: &RingValue) -> Result<RingValue> {
    same(x, y)?;
    Ok(x.ring.add(x, y))
}

pub fn ring_sub(x: &RingValue, y: &RingValue) -> Result<RingValue> {
    same(x, y)?;
    Ok(x.ring.sub(x, y))
}

pub fn ring_mul(x: &RingValue, y: &RingValue) -> Result<RingValue> {
    same(x, y)?;
    Ok(x.ring.mul(x, y))
}

pub fn ring_neg(x: &RingValue) -> RingValue {
    x.ring.neg(x)
}

pub fn ring_inverse(x: &RingValue) -> Result<RingValue> {
    x.ring.inverse(x)
}

pub fn ring_zero(ring: &DynRing) -> RingValue {
    ring.zero()
}

pub fn ring_one(ring: &DynRing) -> Result<RingValue> {
    ring.try_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn ring(v: serde_json::Value) -> DynRing {
        DynRing::new(&serde_json::from_value(v).unwrap()).unwrap()
    }

    #[test]
    fn dynamic_arithmetic() {
        let z8 = ring(json!({"kind":"modular","m":8}));
        let six = z8.parse(&json!(6)).unwrap();
        assert_eq!(ring_add(&six, &six).unwrap().to_string(), "4");

        let b = ring(json!({"kind":"boolean"}));
        let x = b.parse(&json!([1, 2])).unwrap();
        let y = b.parse(&json!([2, 3])).unwrap();
        assert_eq!(ring_add(&x, &y).unwrap().to_string(), "{1,3}");

        let q = ring(json!({"kind":"rational"}));
        let a = q.parse(&json!("2/3")).unwrap();
        let c = q.parse(&json!("3/4")).unwrap();
        assert_eq!(ring_mul(&a, &c).unwrap().to_string(), "1/2");
        assert!(ring_inverse(&q.zero()).is_err());
    }

    #[test]
    fn mixed_descriptors_are_rejected() {
        let z7 = ring(json!({"kind":"modular","m":7}));
        let z8 = ring(json!({"kind":"modular","m":8}));
        let err = ring_add(&z7.one(), &z8.one()).unwrap_err();
        assert!(matches!(err, Error::DescriptorMismatch { .. }));
        assert!(z7.from_payload(Payload::Boolean(1)).is_err());
    }
}
