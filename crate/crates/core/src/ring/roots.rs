//! Root finding: exhaustive search over finite rings and quadratics elsewhere.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::rational::rational_sqrt;
use super::{Quad, QuadraticField, Ring, RingDescriptor};
use crate::error::{Error, Result};

/// Value of Σ coeffs[i]·xⁱ by Horner's rule.
pub fn poly_eval<R: Ring + ?Sized>(ring: &R, coeffs: &[R::Elem], x: &R::Elem) -> R::Elem {
    let mut it = coeffs.iter().rev();
    let mut acc = it.next().cloned().unwrap_or_else(|| ring.zero());
    for c in it {
        acc = ring.add(&ring.mul(&acc, x), c);
    }
    acc
}

/// Every root of Σ coeffs[i]·xⁱ in a finite ring, in carrier order.
pub fn brute_force_roots<R: Ring + ?Sized>(ring: &R, coeffs: &[R::Elem]) -> Result<Vec<R::Elem>> {
    if coeffs.is_empty() {
        return Err(Error::InvalidValue("polynomial has no coefficients".into()));
    }
    let elements = ring
        .elements()
        .ok_or_else(|| Error::InfiniteRing(ring.descriptor().to_string()))?;
    Ok(elements
        .into_iter()
        .filter(|x| ring.is_zero(&poly_eval(ring, coeffs, x)))
        .collect())
}

/// What a degenerate quadratic (leading coefficient zero) reduces to.
#[derive(Debug, Clone, PartialEq)]
pub enum Degenerate<E> {
    /// a1·r + a0 = 0 with a1 a unit.
    Root(E),
    /// 0·r + a0 = 0 with a0 ≠ 0.
    Inconsistent,
    /// 0 = 0.
    AllElements,
}

/// Roots at a single grid point of a real or sampled quadratic.
#[derive(Debug, Clone, PartialEq)]
pub enum PointRoots {
    Two(f64, f64),
    Double(f64),
    Conjugate { modulus: f64, angle: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum RootResult<E> {
    TwoRoots(E, E),
    DoubleRoot(E),
    /// Rational coefficients with non-square discriminant: roots in ℚ(√d).
    RingExtensionRoots { field: QuadraticField, roots: [Quad; 2] },
    Degenerate(Degenerate<E>),
    /// Negative discriminant over the reals: roots modulus·e^{±i·angle}.
    ConjugatePair { modulus: E, angle: E },
    /// Sampled coefficients whose discriminant changes sign across the grid.
    Mixed(Vec<PointRoots>),
    NoRoots(String),
}

/// Square-free part of a nonzero integer, keeping its sign.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    let mut rest = n.abs();
    let mut out = BigInt::from(1);
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += 1;
    }
    out *= rest;
    if n.is_negative() {
        -out
    } else {
        out
    }
}

/// Roots of a2·r² + a1·r + a0 in rings that are not finite.
pub fn quadratic_roots<R: Ring + ?Sized>(
    ring: &R,
    a2: &R::Elem,
    a1: &R::Elem,
    a0: &R::Elem,
) -> Result<RootResult<R::Elem>> {
    if ring.elements().is_some() {
        return Err(Error::InvalidValue(format!(
            "{} is finite; use brute_force_roots",
            ring.descriptor()
        )));
    }
    if ring.is_zero(a2) {
        return Ok(RootResult::Degenerate(linear(ring, a1, a0)));
    }
    let rational_kind = matches!(ring.descriptor(), RingDescriptor::Integer | RingDescriptor::Rational);
    if let (true, Some(q2), Some(q1), Some(q0)) =
        (rational_kind, ring.to_rational(a2), ring.to_rational(a1), ring.to_rational(a0))
    {
        return rational_quadratic(ring, &q2, &q1, &q0);
    }
    if let (Some(s2), Some(s1), Some(s0)) =
        (ring.real_samples(a2), ring.real_samples(a1), ring.real_samples(a0))
    {
        return real_quadratic(ring, &s2, &s1, &s0);
    }
    let two = ring.from_i64(2);
    let four = ring.from_i64(4);
    let disc = ring.sub(&ring.mul(a1, a1), &ring.mul(&four, &ring.mul(a2, a0)));
    let denom = ring.inverse(&ring.mul(&two, a2))?;
    let minus_a1 = ring.neg(a1);
    if ring.is_zero(&disc) {
        return Ok(RootResult::DoubleRoot(ring.mul(&minus_a1, &denom)));
    }
    match ring.sqrt(&disc) {
        Ok(s) => Ok(RootResult::TwoRoots(
            ring.mul(&ring.sub(&minus_a1, &s), &denom),
            ring.mul(&ring.add(&minus_a1, &s), &denom),
        )),
        Err(_) => Ok(RootResult::NoRoots(format!(
            "discriminant {} has no square root in {}",
            ring.format(&disc),
            ring.descriptor()
        ))),
    }
}

fn linear<R: Ring + ?Sized>(ring: &R, a1: &R::Elem, a0: &R::Elem) -> Degenerate<R::Elem> {
    if ring.is_zero(a1) {
        if ring.is_zero(a0) {
            Degenerate::AllElements
        } else {
            Degenerate::Inconsistent
        }
    } else {
        match ring.inverse(a1) {
            Ok(inv) => Degenerate::Root(ring.neg(&ring.mul(a0, &inv))),
            Err(_) => Degenerate::Inconsistent,
        }
    }
}

fn rational_quadratic<R: Ring + ?Sized>(
    ring: &R,
    a2: &BigRational,
    a1: &BigRational,
    a0: &BigRational,
) -> Result<RootResult<R::Elem>> {
    let two = BigRational::from_integer(2.into());
    let four = BigRational::from_integer(4.into());
    let disc = a1 * a1 - four * a2 * a0;
    let centre = -a1 / (&two * a2);
    let convert = |q: &BigRational| ring.from_rational(q);
    if disc.is_zero() {
        return Ok(match convert(&centre) {
            Ok(r) => RootResult::DoubleRoot(r),
            Err(_) => RootResult::NoRoots(format!("double root {centre} is not in {}", ring.descriptor())),
        });
    }
    if let Some(s) = rational_sqrt(&disc) {
        let half = (s / (&two * a2)).abs();
        let (lo, hi) = (&centre - &half, &centre + &half);
        return Ok(match (convert(&lo), convert(&hi)) {
            (Ok(x), Ok(y)) => RootResult::TwoRoots(x, y),
            _ => RootResult::NoRoots(format!("roots {lo}, {hi} are not in {}", ring.descriptor())),
        });
    }
    // disc = n/m = (n·m)/m²; √disc = √(sf·k²)/m = (k/m)·√sf.
    let nm = disc.numer() * disc.denom();
    let d = squarefree_part(&nm);
    let k2 = BigRational::new(nm / &d, disc.denom() * disc.denom());
    let k = rational_sqrt(&k2).expect("cofactor of the square-free part is a square");
    let d_small = i64::try_from(&d)
        .map_err(|_| Error::InvalidValue(format!("discriminant part {d} is too large")))?;
    let field = QuadraticField::new(d_small)?;
    let q = (k / (&two * a2)).abs();
    let roots = [Quad::new(centre.clone(), -&q), Quad::new(centre, q)];
    Ok(RootResult::RingExtensionRoots { field, roots })
}

fn real_quadratic<R: Ring + ?Sized>(
    ring: &R,
    a2: &[f64],
    a1: &[f64],
    a0: &[f64],
) -> Result<RootResult<R::Elem>> {
    let tol = 1e-12;
    let points: Vec<PointRoots> = a2
        .iter()
        .zip(a1)
        .zip(a0)
        .map(|((&a, &b), &c)| {
            let disc = b * b - 4.0 * a * c;
            let scale = (b * b).max((4.0 * a * c).abs()).max(1.0);
            if disc.abs() <= tol * scale {
                PointRoots::Double(-b / (2.0 * a))
            } else if disc > 0.0 {
                let s = disc.sqrt();
                // Avoid cancellation: compute the larger-magnitude root first.
                let q = -0.5 * (b + b.signum() * s);
                let (x, y) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
                PointRoots::Two(x.min(y), x.max(y))
            } else {
                let re = -b / (2.0 * a);
                let im = (-disc).sqrt() / (2.0 * a.abs());
                PointRoots::Conjugate { modulus: re.hypot(im), angle: im.atan2(re) }
            }
        })
        .collect();
    let column = |f: &dyn Fn(&PointRoots) -> f64| -> Result<R::Elem> {
        ring.from_samples(&points.iter().map(f).collect::<Vec<_>>())
    };
    if points.iter().all(|p| matches!(p, PointRoots::Two(..))) {
        let lo = column(&|p| if let PointRoots::Two(x, _) = p { *x } else { f64::NAN })?;
        let hi = column(&|p| if let PointRoots::Two(_, y) = p { *y } else { f64::NAN })?;
        Ok(RootResult::TwoRoots(lo, hi))
    } else if points.iter().all(|p| matches!(p, PointRoots::Double(_))) {
        Ok(RootResult::DoubleRoot(column(&|p| if let PointRoots::Double(x) = p { *x } else { f64::NAN })?))
    } else if points.iter().all(|p| matches!(p, PointRoots::Conjugate { .. })) {
        let modulus = column(&|p| if let PointRoots::Conjugate { modulus, .. } = p { *modulus } else { f64::NAN })?;
        let angle = column(&|p| if let PointRoots::Conjugate { angle, .. } = p { *angle } else { f64::NAN })?;
        Ok(RootResult::ConjugatePair { modulus, angle })
    } else {
        Ok(RootResult::Mixed(points))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{BooleanRing, Integers, RealField, Rationals, SampledFunctions, Zmod};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn exhaustive_roots() {
        let z12 = Zmod::new(12).unwrap();
        let c = [4, z12.from_i64(-2), 1];
        assert_eq!(brute_force_roots(&z12, &c).unwrap(), vec![4, 10]);
        let z7 = Zmod::new(7).unwrap();
        let c = [1, z7.from_i64(-4), 2];
        assert_eq!(brute_force_roots(&z7, &c).unwrap(), vec![3, 6]);
        let z5 = Zmod::new(5).unwrap();
        let c = [4, z5.from_i64(-2), 1];
        assert!(brute_force_roots(&z5, &c).unwrap().is_empty());
        assert!(matches!(brute_force_roots(&Integers, &[q(1).to_integer()]), Err(Error::InfiniteRing(_))));
        let b = BooleanRing::new(4).unwrap();
        // r² = r for every element, so r² + r has every element as a root.
        assert_eq!(brute_force_roots(&b, &[0, 1 | 2 | 4 | 8, 15]).unwrap().len(), 16);
    }

    #[test]
    fn rational_quadratics() {
        let r = Rationals;
        match quadratic_roots(&r, &q(2), &q(-4), &q(1)).unwrap() {
            RootResult::RingExtensionRoots { field, roots } => {
                assert_eq!(field.d(), 2);
                let half = BigRational::new(1.into(), 2.into());
                assert_eq!(roots[0], Quad::new(q(1), -half.clone()));
                assert_eq!(roots[1], Quad::new(q(1), half));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            quadratic_roots(&r, &q(0), &q(0), &q(-3)).unwrap(),
            RootResult::Degenerate(Degenerate::Inconsistent)
        );
        assert_eq!(quadratic_roots(&r, &q(1), &q(-2), &q(1)).unwrap(), RootResult::DoubleRoot(q(1)));
        assert_eq!(quadratic_roots(&r, &q(1), &q(-5), &q(6)).unwrap(), RootResult::TwoRoots(q(2), q(3)));
        assert!(quadratic_roots(&Zmod::new(7).unwrap(), &1, &0, &1).is_err());
    }

    #[test]
    fn extension_and_float_quadratics() {
        let k = QuadraticField::new(2).unwrap();
        // (r − √2)(r + √2) = r² − 2
        match quadratic_roots(&k, &k.one(), &k.zero(), &k.from_i64(-2)).unwrap() {
            RootResult::TwoRoots(a, b) => {
                assert_eq!(k.mul(&a, &b), k.from_i64(-2));
                assert_eq!(k.add(&a, &b), k.zero());
            }
            other => panic!("unexpected {other:?}"),
        }
        let re = RealField::<f64>::default();
        match quadratic_roots(&re, &1.0, &-2.0, &4.0).unwrap() {
            RootResult::ConjugatePair { modulus, angle } => {
                assert!((modulus - 2.0).abs() < 1e-12);
                assert!((angle - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let s = SampledFunctions::<f64>::new(&[0.0, 3.0], 1e-12).unwrap();
        // r² − s: complex-free at s = 3, double at s = 0.
        let res = quadratic_roots(&s, &s.one(), &s.zero(), &s.neg(&s.variable_s().unwrap())).unwrap();
        assert!(matches!(res, RootResult::Mixed(_)));
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(&BigInt::from(8)), BigInt::from(2));
        assert_eq!(squarefree_part(&BigInt::from(-12)), BigInt::from(-3));
        assert_eq!(squarefree_part(&BigInt::from(45)), BigInt::from(5));
    }
}
