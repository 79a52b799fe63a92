use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rational::rational_sqrt;
use super::{format_rational, json_to_rational, not_a_unit, ElementClass, Ring, RingDescriptor};
use crate::error::{Error, Result};

/// p + q·√d with rational p, q, stored as (a + b·√d)/c over a single
/// positive denominator with gcd(a, b, c) = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl Quad {
    pub fn new(p: BigRational, q: BigRational) -> Self {
        let c = p.denom().lcm(q.denom());
        let a = p.numer() * (&c / p.denom());
        let b = q.numer() * (&c / q.denom());
        Quad::reduced(a, b, c)
    }

    pub fn rational(p: BigRational) -> Self {
        let (a, c) = p.into();
        Quad { a, b: BigInt::zero(), c }
    }

    fn reduced(mut a: BigInt, mut b: BigInt, mut c: BigInt) -> Self {
        if c.is_negative() {
            (a, b, c) = (-a, -b, -c);
        }
        if !c.is_one() {
            let g = a.gcd(&b).gcd(&c);
            if !g.is_one() {
                a /= &g;
                b /= &g;
                c /= &g;
            }
        }
        Quad { a, b, c }
    }

    pub fn p(&self) -> BigRational {
        BigRational::new(self.a.clone(), self.c.clone())
    }

    pub fn q(&self) -> BigRational {
        BigRational::new(self.b.clone(), self.c.clone())
    }

    fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

/// The quadratic field ℚ(√d) for square-free d ≠ 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticField {
    d: i64,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        RingDescriptor::QuadraticExt { d }.validate()?;
        Ok(QuadraticField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    fn d_rat(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.d))
    }

    /// √d itself.
    pub fn root(&self) -> Quad {
        Quad::new(BigRational::zero(), BigRational::one())
    }

    /// Norm p² − d·q².
    pub fn norm(&self, a: &Quad) -> BigRational {
        BigRational::new(&a.a * &a.a - BigInt::from(self.d) * &a.b * &a.b, &a.c * &a.c)
    }

    /// Numeric value for real fields (d > 0).
    pub fn to_f64(&self, a: &Quad) -> f64 {
        let p = a.p().to_f64().unwrap_or(f64::NAN);
        let q = a.q().to_f64().unwrap_or(f64::NAN);
        p + q * (self.d as f64).sqrt()
    }

    pub fn lift(&self, q: &BigRational) -> Quad {
        Quad::rational(q.clone())
    }
}

impl Ring for QuadraticField {
    type Elem = Quad;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::QuadraticExt { d: self.d }
    }

    fn zero(&self) -> Quad {
        Quad::rational(BigRational::zero())
    }

    fn one(&self) -> Quad {
        Quad::rational(BigRational::one())
    }

    fn from_bigint(&self, v: &BigInt) -> Quad {
        Quad::rational(BigRational::from_integer(v.clone()))
    }

    fn from_rational(&self, q: &BigRational) -> Result<Quad> {
        Ok(Quad::rational(q.clone()))
    }

    fn to_rational(&self, a: &Quad) -> Option<BigRational> {
        a.is_rational().then(|| a.p())
    }

    fn add(&self, x: &Quad, y: &Quad) -> Quad {
        if x.c == y.c {
            return Quad::reduced(&x.a + &y.a, &x.b + &y.b, x.c.clone());
        }
        Quad::reduced(&x.a * &y.c + &y.a * &x.c, &x.b * &y.c + &y.b * &x.c, &x.c * &y.c)
    }

    fn neg(&self, x: &Quad) -> Quad {
        Quad { a: -&x.a, b: -&x.b, c: x.c.clone() }
    }

    fn mul(&self, x: &Quad, y: &Quad) -> Quad {
        Quad::reduced(
            &x.a * &y.a + BigInt::from(self.d) * &x.b * &y.b,
            &x.a * &y.b + &x.b * &y.a,
            &x.c * &y.c,
        )
    }

    fn classify(&self, a: &Quad) -> ElementClass {
        if a.a.is_zero() && a.b.is_zero() {
            ElementClass::Zero
        } else {
            ElementClass::Unit
        }
    }

    /// c/(a + b√d) = c(a − b√d)/(a² − d·b²).
    fn inverse(&self, x: &Quad) -> Result<Quad> {
        let n = &x.a * &x.a - BigInt::from(self.d) * &x.b * &x.b;
        if n.is_zero() {
            return Err(not_a_unit(self, x, "zero has no reciprocal"));
        }
        Ok(Quad::reduced(&x.c * &x.a, -(&x.c * &x.b), n))
    }

    /// Solves (u + v√d)² = p + q√d through u² + d·v² = p, 2uv = q.
    fn sqrt(&self, x: &Quad) -> Result<Quad> {
        let fail = || Error::NoSquareRoot(self.format(x));
        let a = Parts { p: x.p(), q: x.q() };
        if a.q.is_zero() {
            if let Some(u) = rational_sqrt(&a.p) {
                return Ok(Quad::rational(u));
            }
            return rational_sqrt(&(&a.p / self.d_rat()))
                .map(|v| Quad::new(BigRational::zero(), v))
                .ok_or_else(fail);
        }
        // u² is a root of T² − pT + d·q²/4 = 0.
        let disc = rational_sqrt(&self.norm(x)).ok_or_else(fail)?;
        let two = BigRational::from_integer(2.into());
        for t in [(&a.p + &disc) / &two, (&a.p - &disc) / &two] {
            if t.is_positive() {
                if let Some(u) = rational_sqrt(&t) {
                    let v = &a.q / (&two * &u);
                    return Ok(Quad::new(u, v));
                }
            }
        }
        Err(fail())
    }

    fn is_field(&self) -> bool {
        true
    }

    fn format(&self, x: &Quad) -> String {
        let a = Parts { p: x.p(), q: x.q() };
        if a.q.is_zero() {
            return format_rational(&a.p);
        }
        let sign = if a.q.is_negative() { '-' } else { '+' };
        format!(
            "{}{}{}*sqrt({})",
            format_rational(&a.p),
            sign,
            format_rational(&a.q.abs()),
            self.d
        )
    }

    fn to_json(&self, a: &Quad) -> serde_json::Value {
        serde_json::json!({ "p": format_rational(&a.p()), "q": format_rational(&a.q()) })
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<Quad> {
        if let serde_json::Value::Object(map) = v {
            let get = |k: &str| -> Result<BigRational> {
                match map.get(k) {
                    Some(x) => json_to_rational(x),
                    None => Ok(BigRational::zero()),
                }
            };
            if let Some(extra) = map.keys().find(|k| *k != "p" && *k != "q") {
                return Err(Error::InvalidValue(format!("unexpected field {extra:?} in quadratic value")));
            }
            return Ok(Quad::new(get("p")?, get("q")?));
        }
        Ok(Quad::rational(json_to_rational(v)?))
    }
}

struct Parts {
    p: BigRational,
    q: BigRational,
}
