//! Closed forms for second-order recurrences with constant coefficients, the
//! Chebyshev and modified Bessel families, and an audit of formula variants
//! against direct iteration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::CoefficientSequence;
use crate::eigen::Eigensequence;
use crate::error::{Error, Result};
use crate::factor::sc_factorize;
use crate::recurrence::{iterate, LinearRecurrence};
use crate::ring::{pow_positive, BooleanRing, RealField, Ring};

/// x_n for x_{n+1} = (a+b)·x_n − ab·x_{n−1} in any ring:
///
///   x_n = bⁿx₀ + (a^{n−1} + b^{n−1} + Σ_{i=2}^{n−1} b^{n−i}a^{i−1})·t₁,  t₁ = x₁ − bx₀,
///
/// valid for n ≥ 2; n ∈ {0, 1} return the initial values. Only positive powers
/// appear, so no identity is needed.
pub fn solve_order2_ring<R: Ring>(ring: &R, a: &R::Elem, b: &R::Elem, x0: &R::Elem, x1: &R::Elem, n: usize) -> R::Elem {
    match n {
        0 => return x0.clone(),
        1 => return x1.clone(),
        _ => {}
    }
    let n = n as u64;
    let t1 = ring.sub(x1, &ring.mul(b, x0));
    let mut s = ring.add(&pow_positive(ring, a, n - 1), &pow_positive(ring, b, n - 1));
    for i in 2..n {
        s = ring.add(&s, &ring.mul(&pow_positive(ring, b, n - i), &pow_positive(ring, a, i - 1)));
    }
    ring.add(&ring.mul(&pow_positive(ring, b, n), x0), &ring.mul(&s, &t1))
}

/// In a Boolean ring (r² = r, 2r = 0) the general form collapses to
/// (a+b)x₁ + ab·x₀ for even n ≥ 2 and (a+b)x₁ + ab·x₁ for odd n ≥ 3.
pub fn boolean_closed_form(ring: &BooleanRing, a: &u128, b: &u128, x0: &u128, x1: &u128, n: usize) -> u128 {
    match n {
        0 => *x0,
        1 => *x1,
        _ => {
            let ab = ring.mul(a, b);
            let last = if n % 2 == 0 { x0 } else { x1 };
            ring.add(&ring.mul(&ring.add(a, b), x1), &ring.mul(&ab, last))
        }
    }
}

/// Which closed form applies, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Order2ClosedForm<E> {
    /// Any ring: the positive-power form above.
    GeneralRing { a: E, b: E, x0: E, x1: E },
    /// Field, a ≠ b: c₁aⁿ + c₂bⁿ.
    FieldDistinct { a: E, b: E, c1: E, c2: E },
    /// Field, a = b: [n·x₁ − (n−1)·b·x₀]·b^{n−1}.
    FieldDouble { b: E, x0: E, x1: E },
    /// Real, f² + 4g < 0: modulus √(−g), angle θ = arccos(f/(2√(−g))).
    ConjugatePair { f: f64, g: f64, x0: f64, x1: f64 },
}

impl<E: Clone> Order2ClosedForm<E> {
    /// Closed form for a field given the roots a, b of r² − (a+b)r + ab.
    pub fn field<R: Ring<Elem = E>>(ring: &R, a: &E, b: &E, x0: &E, x1: &E) -> Result<Self> {
        if ring.equal(a, b) {
            return Ok(Order2ClosedForm::FieldDouble { b: b.clone(), x0: x0.clone(), x1: x1.clone() });
        }
        let inv = ring.inverse(&ring.sub(a, b))?;
        let c1 = ring.mul(&ring.sub(x1, &ring.mul(b, x0)), &inv);
        let c2 = ring.mul(&ring.sub(&ring.mul(a, x0), x1), &inv);
        Ok(Order2ClosedForm::FieldDistinct { a: a.clone(), b: b.clone(), c1, c2 })
    }

    pub fn eval<R: Ring<Elem = E>>(&self, ring: &R, n: usize) -> Result<E> {
        Ok(match self {
            Order2ClosedForm::GeneralRing { a, b, x0, x1 } => solve_order2_ring(ring, a, b, x0, x1, n),
            Order2ClosedForm::FieldDistinct { a, b, c1, c2 } => {
                ring.add(&ring.mul(c1, &ring.pow(a, n as u64)), &ring.mul(c2, &ring.pow(b, n as u64)))
            }
            Order2ClosedForm::FieldDouble { b, x0, x1 } => {
                if n == 0 {
                    x0.clone()
                } else {
                    let nn = ring.from_i64(n as i64);
                    let m = ring.from_i64(n as i64 - 1);
                    let bracket = ring.sub(&ring.mul(&nn, x1), &ring.mul(&m, &ring.mul(b, x0)));
                    ring.mul(&bracket, &ring.pow(b, n as u64 - 1))
                }
            }
            Order2ClosedForm::ConjugatePair { f, g, x0, x1 } => {
                ring.real_constant(conjugate_point(*f, *g, *x0, *x1, n).ok_or_else(|| Error::WrongRegion {
                    point: 0,
                    message: "f² + 4g ≥ 0".into(),
                })?)?
            }
        })
    }
}

/// x_n for x_{n+1} = (a+b)·x_n − ab·x_{n−1} over a field.
pub fn solve_order2_field<R: Ring>(ring: &R, a: &R::Elem, b: &R::Elem, x0: &R::Elem, x1: &R::Elem, n: usize) -> Result<R::Elem> {
    Order2ClosedForm::field(ring, a, b, x0, x1)?.eval(ring, n)
}

/// x_n = (−g)^{n/2}·[x₀·cos nθ + ((2x₁ − f·x₀)/√(−f² − 4g))·sin nθ] for
/// x_{n+1} = f·x_n + g·x_{n−1}; None outside the region f² + 4g < 0.
fn conjugate_point(f: f64, g: f64, x0: f64, x1: f64, n: usize) -> Option<f64> {
    let h2 = f * f + 4.0 * g;
    if h2 >= 0.0 {
        return None;
    }
    let m = (-g).sqrt();
    let theta = (f / (2.0 * m)).clamp(-1.0, 1.0).acos();
    let nf = n as f64;
    let coef = (2.0 * x1 - f * x0) / (-h2).sqrt();
    Some(m.powf(nf) * (x0 * (nf * theta).cos() + coef * (nf * theta).sin()))
}

fn samples<R: Ring>(ring: &R, x: &R::Elem) -> Result<Vec<f64>> {
    ring.real_samples(x)
        .ok_or_else(|| Error::Type(format!("real closed forms need a real or sampled ring, not {}", ring.descriptor())))
}

fn pointwise<R: Ring>(
    ring: &R,
    args: [&R::Elem; 4],
    f: impl Fn(usize, [f64; 4]) -> Result<f64>,
) -> Result<R::Elem> {
    let cols: Vec<Vec<f64>> = args.iter().map(|x| samples(ring, x)).collect::<Result<_>>()?;
    let len = cols[0].len();
    if cols.iter().any(|c| c.len() != len) {
        return Err(Error::GridMismatch("arguments have different grid sizes".into()));
    }
    let out: Vec<f64> = (0..len)
        .map(|i| f(i, [cols[0][i], cols[1][i], cols[2][i], cols[3][i]]))
        .collect::<Result<_>>()?;
    ring.from_samples(&out)
}

/// Conjugate-root closed form, pointwise on real or sampled rings.
pub fn solve_order2_conjugate<R: Ring>(ring: &R, f: &R::Elem, g: &R::Elem, x0: &R::Elem, x1: &R::Elem, n: usize) -> Result<R::Elem> {
    pointwise(ring, [f, g, x0, x1], |i, [f, g, x0, x1]| {
        conjugate_point(f, g, x0, x1, n).ok_or_else(|| Error::WrongRegion {
            point: i,
            message: format!("f² + 4g = {} is not negative", f * f + 4.0 * g),
        })
    })
}

/// Real closed form for x_{n+1} = f·x_n + g·x_{n−1}, choosing at each point
/// between distinct real roots, a double root and a conjugate pair by the sign
/// of f² + 4g.
pub fn solve_order2_real<R: Ring>(ring: &R, f: &R::Elem, g: &R::Elem, x0: &R::Elem, x1: &R::Elem, n: usize) -> Result<R::Elem> {
    let re = RealField::<f64>::default();
    pointwise(ring, [f, g, x0, x1], |_, [f, g, x0, x1]| {
        let h2 = f * f + 4.0 * g;
        let scale = (f * f).max(4.0 * g.abs()).max(f64::MIN_POSITIVE);
        if h2.abs() <= 1e-14 * scale {
            solve_order2_field(&re, &(f / 2.0), &(f / 2.0), &x0, &x1, n)
        } else if h2 > 0.0 {
            let h = h2.sqrt();
            solve_order2_field(&re, &((f + h) / 2.0), &((f - h) / 2.0), &x0, &x1, n)
        } else {
            Ok(conjugate_point(f, g, x0, x1, n).expect("negative discriminant"))
        }
    })
}

/// T_n(s): cos(n·arccos s) for |s| < 1, exact at s = ±1, and for |s| > 1 the
/// expansion ½(s+√(s²−1))ⁿ + ½(s−√(s²−1))ⁿ = Σ_j C(n,2j)·s^{n−2j}(s²−1)^j
/// evaluated in exact rational arithmetic and rounded once.
pub fn chebyshev_t(s: f64, n: usize) -> f64 {
    if s == 1.0 {
        return 1.0;
    }
    if s == -1.0 {
        return if n % 2 == 0 { 1.0 } else { -1.0 };
    }
    if s.abs() < 1.0 {
        return (n as f64 * s.acos()).cos();
    }
    let Some(q) = BigRational::from_f64(s) else {
        return f64::NAN;
    };
    let d = &q * &q - BigRational::one();
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    for j in 0..=n / 2 {
        if j > 0 {
            // C(n, 2j) from C(n, 2j−2)
            let k = 2 * j;
            binom = binom * BigInt::from((n - k + 2) * (n - k + 1)) / BigInt::from(k * (k - 1));
        }
        let term = BigRational::from_integer(binom.clone()) * pow_q(&q, n - 2 * j) * pow_q(&d, j);
        total += term;
    }
    total.to_f64().unwrap_or(f64::NAN)
}

fn pow_q(q: &BigRational, e: usize) -> BigRational {
    num_traits::pow(q.clone(), e)
}

/// x_{n+1} = (2n/s)·x_n + x_{n−1}, the recurrence of the modified Bessel functions in n.
pub fn bessel_recurrence<R: Ring>(ring: &R, x0: R::Elem, x1: R::Elem) -> Result<LinearRecurrence<R>> {
    LinearRecurrence::new(
        ring.clone(),
        vec![CoefficientSequence::formula("2*n/s", ring)?, CoefficientSequence::Constant(ring.one())],
        CoefficientSequence::Constant(ring.zero()),
        vec![x0, x1],
    )
}

/// x_n from the factorization along the ratios of a positive unitary solution
/// u_0..u_m (m ≥ n): the factor is t_{n+1} = −(u_{n−1}/u_n)·t_n and the cofactor
/// x_{n+1} = (u_{n+1}/u_n)·x_n + t_{n+1}.
pub fn bessel_general_solution<R: Ring>(rec: &LinearRecurrence<R>, u: &[R::Elem], x0: R::Elem, x1: R::Elem, n: usize) -> Result<R::Elem> {
    let ring = &rec.ring;
    check_grid(ring, u, &[&x0, &x1])?;
    if u.len() < n + 2 {
        return Err(Error::InvalidValue(format!("need u_0..u_{} for n = {n}", n + 1)));
    }
    let ratios = (1..u.len()).map(|i| ring.div(&u[i], &u[i - 1])).collect::<Result<Vec<_>>>()?;
    let alpha = std::sync::Arc::new(Eigensequence::listed(ring.clone(), ratios, false)?);
    let f = sc_factorize(&rec.with_initials(vec![x0, x1])?, alpha)?;
    let sol = f.solve(n, false)?;
    Ok(sol.x[n].clone())
}

fn check_grid<R: Ring>(ring: &R, u: &[R::Elem], xs: &[&R::Elem]) -> Result<()> {
    let len = |x: &R::Elem| ring.real_samples(x).map(|v| v.len());
    let want = u.first().and_then(len);
    for x in xs.iter().copied().chain(u.iter()) {
        if len(x) != want {
            return Err(Error::GridMismatch(format!("expected {:?} grid points, found {:?}", want, len(x))));
        }
    }
    Ok(())
}

/// Summation form x_n = u_n·[x₀/u₀ + t₁·u₀·Σ_{i=1}^{upper} (−1)^{i−1}/(u_{i−1}u_i)],
/// t₁ = x₁ − (u₁/u₀)·x₀. The identity holds with upper = n.
pub fn bessel_sum_formula<R: Ring>(ring: &R, u: &[R::Elem], x0: &R::Elem, x1: &R::Elem, n: usize, upper: usize) -> Result<R::Elem> {
    let t1 = ring.sub(x1, &ring.mul(&ring.div(&u[1], &u[0])?, x0));
    let mut sum = ring.zero();
    for i in 1..=upper {
        let term = ring.inverse(&ring.mul(&u[i - 1], &u[i]))?;
        sum = if i % 2 == 1 { ring.add(&sum, &term) } else { ring.sub(&sum, &term) };
    }
    let inner = ring.add(&ring.div(x0, &u[0])?, &ring.mul(&ring.mul(&t1, &u[0]), &sum));
    Ok(ring.mul(&u[n], &inner))
}

/// Formula whose variant is compared with the corrected form and with iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AuditCase {
    /// x_{n+1} = f·x_n + g·x_{n−1}, f² + 4g < 0; variant sine coefficient (f·x₀ − 2x₁)/(f² + 4g).
    Conjugate { f: f64, g: f64, x0: f64, x1: f64 },
    /// Chebyshev (f = 2s, g = −1); variant sine coefficient (s·x₀ − x₁)/(s² − 1).
    Chebyshev { s: f64, x0: f64, x1: f64 },
    /// u₄ of the Bessel recurrence from u₀ = u₁ = 1; variant 48/s³ + 24/s² + 2/s + 1.
    BesselU4 { s: f64 },
    /// Bessel summation form; variant sums to n − 1 instead of n.
    BesselSum { s: f64, x0: f64, x1: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub n: usize,
    pub oracle: f64,
    pub corrected: f64,
    pub variant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    #[serde(flatten)]
    pub case: AuditCase,
    pub rows: Vec<AuditRow>,
    pub corrected_max_deviation: f64,
    pub variant_max_deviation: f64,
    /// Sine coefficients (corrected, variant) for the trigonometric cases.
    pub sine_coefficients: Option<(f64, f64)>,
}

fn oracle_f64(a0: CoefficientSequence<RealField>, a1: f64, x0: f64, x1: f64, horizon: usize) -> Result<Vec<f64>> {
    let re = RealField::<f64>::default();
    let rec = LinearRecurrence::new(re, vec![a0, CoefficientSequence::Constant(a1)], CoefficientSequence::Constant(0.0), vec![x0, x1])?;
    Ok(iterate(&rec, horizon)?.into_terms())
}

/// Compare a formula variant and its corrected form with direct iteration for n ≤ horizon.
pub fn formula_audit(case: AuditCase, horizon: usize) -> Result<AuditReport> {
    let re = RealField::<f64>::default();
    let (rows, coefs) = match &case {
        AuditCase::Conjugate { f, g, x0, x1 } => trig_rows(*f, *g, *x0, *x1, (f * x0 - 2.0 * x1) / (f * f + 4.0 * g), horizon)?,
        AuditCase::Chebyshev { s, x0, x1 } => trig_rows(2.0 * s, -1.0, *x0, *x1, (s * x0 - x1) / (s * s - 1.0), horizon)?,
        AuditCase::BesselU4 { s } => {
            let s = *s;
            let oracle = oracle_f64(CoefficientSequence::custom(move |_: &RealField, n| Ok(2.0 * n as f64 / s)), 1.0, 1.0, 1.0, 4)?;
            let p = |c: f64| 48.0 / s.powi(3) + 24.0 / s.powi(2) + c / s + 1.0;
            (vec![AuditRow { n: 4, oracle: oracle[4], corrected: p(8.0), variant: p(2.0) }], None)
        }
        AuditCase::BesselSum { s, x0, x1 } => {
            let s = *s;
            let a0 = move || CoefficientSequence::custom(move |_: &RealField, n| Ok(2.0 * n as f64 / s));
            let u = oracle_f64(a0(), 1.0, 1.0, 1.0, horizon.max(1))?;
            let oracle = oracle_f64(a0(), 1.0, *x0, *x1, horizon)?;
            let rows = (0..=horizon)
                .map(|n| {
                    Ok(AuditRow {
                        n,
                        oracle: oracle[n],
                        corrected: bessel_sum_formula(&re, &u, x0, x1, n, n)?,
                        variant: bessel_sum_formula(&re, &u, x0, x1, n, n.saturating_sub(1))?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, None)
        }
    };
    let dev = |pick: fn(&AuditRow) -> f64| rows.iter().map(|r| (pick(r) - r.oracle).abs()).fold(0.0, f64::max);
    Ok(AuditReport {
        corrected_max_deviation: dev(|r| r.corrected),
        variant_max_deviation: dev(|r| r.variant),
        case,
        rows,
        sine_coefficients: coefs,
    })
}

type TrigRows = (Vec<AuditRow>, Option<(f64, f64)>);

fn trig_rows(f: f64, g: f64, x0: f64, x1: f64, variant_coef: f64, horizon: usize) -> Result<TrigRows> {
    let h2 = f * f + 4.0 * g;
    if h2 >= 0.0 {
        return Err(Error::WrongRegion { point: 0, message: format!("f² + 4g = {h2} is not negative") });
    }
    let oracle = oracle_f64(CoefficientSequence::Constant(f), g, x0, x1, horizon)?;
    let m = (-g).sqrt();
    let theta = (f / (2.0 * m)).clamp(-1.0, 1.0).acos();
    let corrected_coef = (2.0 * x1 - f * x0) / (-h2).sqrt();
    let eval = |coef: f64, n: usize| {
        let nf = n as f64;
        m.powf(nf) * (x0 * (nf * theta).cos() + coef * (nf * theta).sin())
    };
    let rows = (0..=horizon)
        .map(|n| AuditRow { n, oracle: oracle[n], corrected: eval(corrected_coef, n), variant: eval(variant_coef, n) })
        .collect();
    Ok((rows, Some((corrected_coef, variant_coef))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::positive_unitary_solution;
    use crate::ring::{Integers, Rationals, SampledFunctions, Zmod};
    use proptest::prelude::*;

    fn qi(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn oracle<R: Ring>(ring: &R, a: &R::Elem, b: &R::Elem, x0: &R::Elem, x1: &R::Elem, n: usize) -> Vec<R::Elem> {
        let rec = LinearRecurrence::constant(
            ring.clone(),
            vec![ring.add(a, b), ring.neg(&ring.mul(a, b))],
            vec![x0.clone(), x1.clone()],
        )
        .unwrap();
        iterate(&rec, n).unwrap().into_terms()
    }

    #[test]
    fn general_ring_examples() {
        let z = Integers;
        assert_eq!(solve_order2_ring(&z, &2.into(), &3.into(), &0.into(), &1.into(), 3), BigInt::from(19));
        let bo = BooleanRing::new(4).unwrap();
        let (a, b, x0, x1) = (bo.set(&[1, 2]).unwrap(), bo.set(&[2, 3]).unwrap(), bo.set(&[1]).unwrap(), bo.set(&[3]).unwrap());
        for n in [4, 5] {
            assert_eq!(solve_order2_ring(&bo, &a, &b, &x0, &x1, n), bo.set(&[3]).unwrap());
            assert_eq!(boolean_closed_form(&bo, &a, &b, &x0, &x1, n), bo.set(&[3]).unwrap());
        }
    }

    #[test]
    fn field_examples() {
        let q = Rationals;
        let form = Order2ClosedForm::field(&q, &qi(2), &qi(3), &qi(0), &qi(1)).unwrap();
        assert_eq!(form, Order2ClosedForm::FieldDistinct { a: qi(2), b: qi(3), c1: qi(-1), c2: qi(1) });
        assert_eq!(form.eval(&q, 4).unwrap(), qi(65));
        for n in 0..10 {
            assert_eq!(solve_order2_field(&q, &qi(2), &qi(2), &qi(1), &qi(2), n).unwrap(), qi(1 << n));
        }
        let z7 = Zmod::new(7).unwrap();
        let o = oracle(&z7, &3, &6, &0, &1, 30);
        for (n, x) in o.iter().enumerate() {
            assert_eq!(solve_order2_field(&z7, &3, &6, &0, &1, n).unwrap(), *x);
        }
        let z8 = Zmod::new(8).unwrap();
        assert!(matches!(solve_order2_field(&z8, &3, &1, &0, &1, 3), Err(Error::NotAUnit { .. })));
    }

    proptest! {
        #[test]
        fn three_way_agreement(a in -9i64..10, b in -9i64..10, x0 in -9i64..10, x1 in -9i64..10) {
            let q = Rationals;
            let (a, b, x0, x1) = (qi(a), qi(b), qi(x0), qi(x1));
            let o = oracle(&q, &a, &b, &x0, &x1, 25);
            for n in 0..=25 {
                prop_assert_eq!(&solve_order2_ring(&q, &a, &b, &x0, &x1, n), &o[n]);
                prop_assert_eq!(&solve_order2_field(&q, &a, &b, &x0, &x1, n).unwrap(), &o[n]);
            }
        }

        #[test]
        fn boolean_matches_oracle(a in 0u128..256, b in 0u128..256, x0 in 0u128..256, x1 in 0u128..256) {
            let bo = BooleanRing::new(8).unwrap();
            let o = oracle(&bo, &a, &b, &x0, &x1, 20);
            for n in 0..=20 {
                prop_assert_eq!(solve_order2_ring(&bo, &a, &b, &x0, &x1, n), o[n]);
                prop_assert_eq!(boolean_closed_form(&bo, &a, &b, &x0, &x1, n), o[n]);
            }
        }
    }

    #[test]
    fn conjugate_examples() {
        let re = RealField::<f64>::default();
        let v = solve_order2_conjugate(&re, &1.0, &-1.0, &1.0, &0.5, 5).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let v = solve_order2_conjugate(&re, &0.0, &-1.0, &0.0, &1.0, 3).unwrap();
        assert!((v + 1.0).abs() < 1e-12);
        let v = solve_order2_conjugate(&re, &1.0, &-1.0, &0.0, &1.0, 2).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(matches!(solve_order2_conjugate(&re, &2.0, &1.0, &0.0, &1.0, 2), Err(Error::WrongRegion { point: 0, .. })));
    }

    #[test]
    fn mixed_region_grid() {
        // f = 2s, g = −1 on a grid straddling |s| = 1.
        let sf = SampledFunctions::<f64>::new(&[0.3, 1.0, 1.7, -2.0], 1e-12).unwrap();
        let f = sf.tabulate(|s| 2.0 * s);
        let g = sf.constant(-1.0);
        let (x0, x1) = (sf.constant(1.0), sf.tabulate(|s| s));
        let rec = LinearRecurrence::constant(sf.clone(), vec![f.clone(), g.clone()], vec![x0.clone(), x1.clone()]).unwrap();
        let o = iterate(&rec, 20).unwrap().into_terms();
        for n in 0..=20 {
            let v = solve_order2_real(&sf, &f, &g, &x0, &x1, n).unwrap();
            for (p, s) in sf.grid().iter().enumerate() {
                assert!((v[p] - o[n][p]).abs() <= 1e-9 * o[n][p].abs().max(1.0), "n={n} s={s}");
                assert!((chebyshev_t(*s, n) - o[n][p]).abs() <= 1e-9 * o[n][p].abs().max(1.0));
            }
        }
        assert!(matches!(solve_order2_conjugate(&sf, &f, &g, &x0, &x1, 3), Err(Error::WrongRegion { point: 1, .. })));
    }

    #[test]
    fn chebyshev_values() {
        assert!((chebyshev_t(0.5, 5) - 0.5).abs() < 1e-12);
        assert_eq!(chebyshev_t(2.0, 2), 7.0);
        assert_eq!(chebyshev_t(-1.0, 3), -1.0);
        assert_eq!(chebyshev_t(1.0, 17), 1.0);
        assert_eq!(chebyshev_t(1.5, 0), 1.0);
        assert_eq!(chebyshev_t(-1.5, 3), 4.0 * -3.375 + 4.5);
    }

    #[test]
    fn bessel() {
        let sf = SampledFunctions::<f64>::new(&[0.5, 1.0, 2.0], 1e-12).unwrap();
        let one = sf.constant(1.0);
        let rec = bessel_recurrence(&sf, one.clone(), one.clone()).unwrap();
        let u = positive_unitary_solution(&rec, vec![one.clone(), one.clone()], 20).unwrap().into_terms();
        assert_eq!(u[4][2], 17.0);
        assert_eq!(u[2][1], 3.0);
        let (x0, x1) = (sf.constant(0.7), sf.tabulate(|s| s + 0.2));
        let o = iterate(&rec.with_initials(vec![x0.clone(), x1.clone()]).unwrap(), 15).unwrap().into_terms();
        for n in 0..=15 {
            let v = bessel_general_solution(&rec, &u, x0.clone(), x1.clone(), n).unwrap();
            let w = bessel_sum_formula(&sf, &u, &x0, &x1, n, n).unwrap();
            for p in 0..3 {
                assert!((v[p] - o[n][p]).abs() <= 1e-9 * o[n][p].abs(), "n={n}");
                assert!((w[p] - o[n][p]).abs() <= 1e-9 * o[n][p].abs(), "n={n}");
            }
        }
        // t₁ = 0 reproduces u; zero initials give zero.
        assert!(sf.equal(&bessel_general_solution(&rec, &u, one.clone(), one.clone(), 9).unwrap(), &u[9]));
        let z = sf.constant(0.0);
        assert!(sf.is_zero(&bessel_general_solution(&rec, &u, z.clone(), z, 9).unwrap()));
        let other = SampledFunctions::<f64>::new(&[1.0], 1e-12).unwrap().constant(1.0);
        assert!(matches!(bessel_general_solution(&rec, &u, other.clone(), other, 3), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn audits() {
        let r = formula_audit(AuditCase::Chebyshev { s: 0.5, x0: 0.0, x1: 1.0 }, 2).unwrap();
        assert!((r.rows[2].oracle - 1.0).abs() < 1e-12);
        assert!((r.rows[2].corrected - 1.0).abs() < 1e-12);
        assert!((r.rows[2].variant - 1.1547005383792515).abs() < 1e-12);
        let r = formula_audit(AuditCase::BesselU4 { s: 2.0 }, 4).unwrap();
        assert_eq!((r.rows[0].oracle, r.rows[0].corrected, r.rows[0].variant), (17.0, 17.0, 14.0));
        let r = formula_audit(AuditCase::BesselSum { s: 2.0, x0: 1.0, x1: 2.0 }, 2).unwrap();
        assert_eq!((r.rows[2].oracle, r.rows[2].variant), (3.0, 4.0));
        assert!(r.corrected_max_deviation < 1e-12);
        // Pure cosine solution: the sine coefficient vanishes and all three agree.
        let r = formula_audit(AuditCase::Conjugate { f: 1.2, g: -2.0, x0: 1.0, x1: 0.6 }, 30).unwrap();
        assert!(r.corrected_max_deviation <= 1e-9 * 2f64.powi(15));
        assert_eq!(r.sine_coefficients.map(|c| c.0), Some(0.0));
        assert!((r.corrected_max_deviation - r.variant_max_deviation).abs() < 1e-9);
    }
}
