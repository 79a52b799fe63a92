use std::cmp::Ordering;
use std::fmt::Debug;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive};

use super::{json_to_rational, not_a_unit, ElementClass, Ring, RingDescriptor};
use crate::error::{Error, Result};
use crate::format::fmt_float;

/// Scalar types usable as real samples.
pub trait Real: Float + Debug + Send + Sync + 'static {}

impl<F: Float + Debug + Send + Sync + 'static> Real for F {}

fn cast<F: Real>(x: f64) -> F {
    F::from(x).expect("f64 converts to every float type")
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn near<F: Real>(a: F, b: F, tol: F) -> bool {
    let scale = F::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale
}

fn json_number<F: Real>(v: &serde_json::Value) -> Result<F> {
    match v {
        serde_json::Value::Number(n) => n
            .as_f64()
            .map(cast)
            .ok_or_else(|| Error::InvalidValue(format!("bad number {n}"))),
        other => Ok(cast(rational_to_f64(&json_to_rational(other)?))),
    }
}

/// Real numbers in floating point; zero means |x| ≤ tol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealField<F: Real = f64> {
    tol: F,
}

impl<F: Real> RealField<F> {
    pub fn new(tol: f64) -> Result<Self> {
        RingDescriptor::Real { tol }.validate()?;
        Ok(RealField { tol: cast(tol) })
    }

    pub fn tol(&self) -> F {
        self.tol
    }
}

impl Default for RealField<f64> {
    fn default() -> Self {
        RealField { tol: 1e-12 }
    }
}

impl<F: Real> Ring for RealField<F> {
    type Elem = F;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Real { tol: self.tol.to_f64().unwrap_or(0.0) }
    }

    fn zero(&self) -> F {
        F::zero()
    }

    fn one(&self) -> F {
        F::one()
    }

    fn from_i64(&self, v: i64) -> F {
        cast(v as f64)
    }

    fn from_bigint(&self, v: &BigInt) -> F {
        cast(v.to_f64().unwrap_or(f64::NAN))
    }

    fn from_rational(&self, q: &BigRational) -> Result<F> {
        Ok(cast(rational_to_f64(q)))
    }

    fn add(&self, a: &F, b: &F) -> F {
        *a + *b
    }

    fn neg(&self, a: &F) -> F {
        -*a
    }

    fn mul(&self, a: &F, b: &F) -> F {
        *a * *b
    }

    fn sub(&self, a: &F, b: &F) -> F {
        *a - *b
    }

    fn equal(&self, a: &F, b: &F) -> bool {
        near(*a, *b, self.tol)
    }

    fn is_zero(&self, a: &F) -> bool {
        a.abs() <= self.tol
    }

    fn classify(&self, a: &F) -> ElementClass {
        if self.is_zero(a) {
            ElementClass::Zero
        } else {
            ElementClass::Unit
        }
    }

    fn inverse(&self, a: &F) -> Result<F> {
        if self.is_zero(a) {
            Err(not_a_unit(self, a, "value is within tolerance of zero"))
        } else {
            Ok(a.recip())
        }
    }

    fn sqrt(&self, a: &F) -> Result<F> {
        if *a < -self.tol {
            Err(Error::NoSquareRoot(self.format(a)))
        } else {
            Ok(a.max(F::zero()).sqrt())
        }
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn is_field(&self) -> bool {
        true
    }

    fn compare(&self, a: &F, b: &F) -> Option<Ordering> {
        a.partial_cmp(b)
    }

    fn real_samples(&self, a: &F) -> Option<Vec<f64>> {
        a.to_f64().map(|x| vec![x])
    }

    fn from_samples(&self, xs: &[f64]) -> Result<F> {
        match xs {
            [x] => Ok(cast(*x)),
            _ => Err(Error::GridMismatch(format!("{} samples for a scalar", xs.len()))),
        }
    }

    fn map_real(&self, a: &F, f: &dyn Fn(f64) -> f64) -> Result<F> {
        Ok(cast(f(a.to_f64().unwrap_or(f64::NAN))))
    }

    fn real_constant(&self, x: f64) -> Result<F> {
        Ok(cast(x))
    }

    fn format(&self, a: &F) -> String {
        fmt_float(a.to_f64().unwrap_or(f64::NAN))
    }

    fn to_json(&self, a: &F) -> serde_json::Value {
        serde_json::Value::from(a.to_f64().unwrap_or(f64::NAN))
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<F> {
        json_number(v)
    }
}

/// Real functions represented by their samples on a fixed grid; all
/// operations act pointwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunctions<F: Real = f64> {
    grid: Arc<[F]>,
    tol: F,
}

impl<F: Real> SampledFunctions<F> {
    pub fn new(grid: &[f64], tol: f64) -> Result<Self> {
        RingDescriptor::Sampled { grid: grid.to_vec(), tol }.validate()?;
        Ok(SampledFunctions {
            grid: grid.iter().map(|&x| cast(x)).collect(),
            tol: cast(tol),
        })
    }

    pub fn grid(&self) -> &[F] {
        &self.grid
    }

    pub fn tol(&self) -> F {
        self.tol
    }

    /// The constant function with value x.
    pub fn constant(&self, x: F) -> Vec<F> {
        vec![x; self.grid.len()]
    }

    /// Tabulate f on the grid.
    pub fn tabulate(&self, f: impl Fn(F) -> F) -> Vec<F> {
        self.grid.iter().map(|&s| f(s)).collect()
    }

    fn zip(&self, a: &[F], b: &[F], f: impl Fn(F, F) -> F) -> Vec<F> {
        a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
    }
}

impl<F: Real> Ring for SampledFunctions<F> {
    type Elem = Vec<F>;

    fn descriptor(&self) -> RingDescriptor {
        RingDescriptor::Sampled {
            grid: self.grid.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
            tol: self.tol.to_f64().unwrap_or(0.0),
        }
    }

    fn zero(&self) -> Vec<F> {
        self.constant(F::zero())
    }

    fn one(&self) -> Vec<F> {
        self.constant(F::one())
    }

    fn from_i64(&self, v: i64) -> Vec<F> {
        self.constant(cast(v as f64))
    }

    fn from_bigint(&self, v: &BigInt) -> Vec<F> {
        self.constant(cast(v.to_f64().unwrap_or(f64::NAN)))
    }

    fn from_rational(&self, q: &BigRational) -> Result<Vec<F>> {
        Ok(self.constant(cast(rational_to_f64(q))))
    }

    fn add(&self, a: &Vec<F>, b: &Vec<F>) -> Vec<F> {
        self.zip(a, b, |x, y| x + y)
    }

    fn neg(&self, a: &Vec<F>) -> Vec<F> {
        a.iter().map(|&x| -x).collect()
    }

    fn mul(&self, a: &Vec<F>, b: &Vec<F>) -> Vec<F> {
        self.zip(a, b, |x, y| x * y)
    }

    fn sub(&self, a: &Vec<F>, b: &Vec<F>) -> Vec<F> {
        self.zip(a, b, |x, y| x - y)
    }

    fn equal(&self, a: &Vec<F>, b: &Vec<F>) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(&x, &y)| near(x, y, self.tol))
    }

    fn is_zero(&self, a: &Vec<F>) -> bool {
        a.iter().all(|x| x.abs() <= self.tol)
    }

    fn classify(&self, a: &Vec<F>) -> ElementClass {
        let small = a.iter().filter(|x| x.abs() <= self.tol).count();
        if small == 0 {
            ElementClass::Unit
        } else if small == a.len() {
            ElementClass::Zero
        } else {
            ElementClass::Undecidable
        }
    }

    fn inverse(&self, a: &Vec<F>) -> Result<Vec<F>> {
        if let Some(i) = a.iter().position(|x| x.abs() <= self.tol) {
            let s = self.grid[i].to_f64().unwrap_or(f64::NAN);
            return Err(not_a_unit(self, a, format!("vanishes at sample {i} (s = {})", fmt_float(s))));
        }
        Ok(a.iter().map(|x| x.recip()).collect())
    }

    fn sqrt(&self, a: &Vec<F>) -> Result<Vec<F>> {
        if a.iter().any(|&x| x < -self.tol) {
            return Err(Error::NoSquareRoot(self.format(a)));
        }
        Ok(a.iter().map(|x| x.max(F::zero()).sqrt()).collect())
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn is_field(&self) -> bool {
        self.grid.len() == 1
    }

    fn real_samples(&self, a: &Vec<F>) -> Option<Vec<f64>> {
        a.iter().map(|x| x.to_f64()).collect()
    }

    fn from_samples(&self, xs: &[f64]) -> Result<Vec<F>> {
        if xs.len() != self.grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                xs.len(),
                self.grid.len()
            )));
        }
        Ok(xs.iter().map(|&x| cast(x)).collect())
    }

    fn map_real(&self, a: &Vec<F>, f: &dyn Fn(f64) -> f64) -> Result<Vec<F>> {
        Ok(a.iter().map(|x| cast(f(x.to_f64().unwrap_or(f64::NAN)))).collect())
    }

    fn real_constant(&self, x: f64) -> Result<Vec<F>> {
        Ok(self.constant(cast(x)))
    }

    fn variable_s(&self) -> Result<Vec<F>> {
        Ok(self.grid.to_vec())
    }

    fn format(&self, a: &Vec<F>) -> String {
        let items: Vec<String> =
            a.iter().map(|x| fmt_float(x.to_f64().unwrap_or(f64::NAN))).collect();
        format!("[{}]", items.join(","))
    }

    fn to_json(&self, a: &Vec<F>) -> serde_json::Value {
        serde_json::Value::from(a.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect::<Vec<f64>>())
    }

    fn parse_json(&self, v: &serde_json::Value) -> Result<Vec<F>> {
        match v {
            serde_json::Value::Array(items) => {
                if items.len() != self.grid.len() {
                    return Err(Error::GridMismatch(format!(
                        "{} samples given for a grid of {} points",
                        items.len(),
                        self.grid.len()
                    )));
                }
                items.iter().map(json_number).collect()
            }
            other => Ok(self.constant(json_number(other)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_tolerance() {
        let r = RealField::<f64>::new(1e-12).unwrap();
        assert!(r.is_zero(&1e-13));
        assert!(matches!(r.sqrt(&-1.0), Err(Error::NoSquareRoot(_))));
        assert_eq!(r.sqrt(&4.0).unwrap(), 2.0);
        let r32 = RealField::<f32>::new(1e-6).unwrap();
        assert_eq!(r32.mul(&1.5, &2.0), 3.0);
    }

    #[test]
    fn sampled_classification() {
        let s = SampledFunctions::<f64>::new(&[0.5, 1.0, 2.0], 1e-12).unwrap();
        assert_eq!(s.classify(&vec![1.0, 2.0, 3.0]), ElementClass::Unit);
        assert_eq!(s.classify(&vec![0.0, 0.0, 0.0]), ElementClass::Zero);
        assert_eq!(s.classify(&vec![1.0, 0.0, 3.0]), ElementClass::Undecidable);
        match s.inverse(&vec![1.0, 0.0, 3.0]) {
            Err(Error::NotAUnit { witness, .. }) => assert!(witness.contains("sample 1")),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s.variable_s().unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(s.parse_json(&serde_json::json!([1, 2])).is_err());
    }
}
