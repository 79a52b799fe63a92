//! Eigensequences: solutions {r_n} of the characteristic equation
//!
//!   ∏_{i=0}^{k} r_{n−i+1} − Σ_{j=0}^{k−1} a_{j,n}·∏_{i=j}^{k−1} r_{n−i} − a_{k,n} = 0,
//!
//! indexed from r_1. Seeded sequences are generated forward by
//! r_{n+1} = a_{0,n} + Σ_{j=1}^{k} a_{j,n}·(r_n⋯r_{n−j+1})⁻¹.

use std::cmp::Ordering;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::recurrence::{LinearRecurrence, SolutionStream};
use crate::ring::roots::{brute_force_roots, poly_eval, quadratic_roots, Degenerate, RootResult};
use crate::ring::{abs, product, ElementClass, Rationals, Ring, RingDescriptor};

/// Which ratio of consecutive terms to take; the two agree in commutative rings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// r_n = x_n·x_{n−1}⁻¹
    Right,
    /// r_n = x_{n−1}⁻¹·x_n
    Left,
}

enum Source<R: Ring> {
    Seeded { rec: Arc<LinearRecurrence<R>> },
    Ratios { stream: SolutionStream<R>, side: Side },
    Constant(R::Elem),
    Listed { terms: Vec<R::Elem>, periodic: bool },
}

struct State<R: Ring> {
    source: Source<R>,
    /// r_1, r_2, … (index i holds r_{i+1}).
    terms: Vec<R::Elem>,
    inverses: Vec<Option<R::Elem>>,
}

/// A lazily generated eigensequence r_1, r_2, …
///
/// Extension is serialized through an internal lock; materialized terms never change.
pub struct Eigensequence<R: Ring> {
    ring: R,
    kind: &'static str,
    state: Mutex<State<R>>,
}

impl<R: Ring> std::fmt::Debug for Eigensequence<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let st = self.state.lock().expect("eigensequence lock");
        f.debug_struct("Eigensequence")
            .field("source", &self.kind)
            .field("terms", &st.terms)
            .finish()
    }
}

impl<R: Ring> Eigensequence<R> {
    fn with_source(ring: R, kind: &'static str, source: Source<R>, terms: Vec<R::Elem>) -> Self {
        let inverses = vec![None; terms.len()];
        Eigensequence { ring, kind, state: Mutex::new(State { source, terms, inverses }) }
    }

    /// The constant sequence r_n = λ.
    pub fn constant(ring: R, value: R::Elem) -> Self {
        Self::with_source(ring, "eigenvalue", Source::Constant(value), Vec::new())
    }

    /// User-supplied terms r_1..r_m, repeated cyclically when `periodic`.
    pub fn listed(ring: R, terms: Vec<R::Elem>, periodic: bool) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidValue("an eigensequence needs at least one term".into()));
        }
        Ok(Self::with_source(ring, "listed", Source::Listed { terms, periodic }, Vec::new()))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    /// "seeded", "ratios", "eigenvalue" or "listed".
    pub fn source_kind(&self) -> &'static str {
        self.kind
    }

    /// r_n for n ≥ 1.
    pub fn term(&self, n: usize) -> Result<R::Elem> {
        if n == 0 {
            return Err(Error::InvalidValue("eigensequences are indexed from 1".into()));
        }
        let mut st = self.state.lock().expect("eigensequence lock");
        self.extend(&mut st, n)?;
        Ok(st.terms[n - 1].clone())
    }

    /// r_n⁻¹, cached.
    pub fn inverse(&self, n: usize) -> Result<R::Elem> {
        let mut st = self.state.lock().expect("eigensequence lock");
        self.extend(&mut st, n)?;
        Self::inverse_locked(&self.ring, &mut st, n, n)
    }

    /// r_1..r_n.
    pub fn prefix(&self, n: usize) -> Result<Vec<R::Elem>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut st = self.state.lock().expect("eigensequence lock");
        self.extend(&mut st, n)?;
        Ok(st.terms[..n].to_vec())
    }

    fn inverse_locked(ring: &R, st: &mut State<R>, i: usize, wanted_by: usize) -> Result<R::Elem> {
        if st.inverses.len() < st.terms.len() {
            st.inverses.resize(st.terms.len(), None);
        }
        if let Some(v) = &st.inverses[i - 1] {
            return Ok(v.clone());
        }
        let r = &st.terms[i - 1];
        match ring.inverse(r) {
            Ok(v) => {
                st.inverses[i - 1] = Some(v.clone());
                Ok(v)
            }
            Err(_) => Err(Error::NonUnitTerm { n: wanted_by, culprit: i, class: ring.classify(r) }),
        }
    }

    fn extend(&self, st: &mut State<R>, n: usize) -> Result<()> {
        let ring = &self.ring;
        while st.terms.len() < n {
            let next_index = st.terms.len() + 1;
            let next = match &mut st.source {
                Source::Constant(v) => v.clone(),
                Source::Listed { terms, periodic } => {
                    if next_index <= terms.len() {
                        terms[next_index - 1].clone()
                    } else if *periodic {
                        terms[(next_index - 1) % terms.len()].clone()
                    } else {
                        return Err(Error::Exhausted(next_index));
                    }
                }
                Source::Ratios { stream, side } => {
                    let side = *side;
                    let x = stream.term(next_index)?;
                    let prev = stream.term(next_index - 1)?;
                    let inv = ring.inverse(&prev).map_err(|_| Error::NonUnitTerm {
                        n: next_index,
                        culprit: next_index - 1,
                        class: ring.classify(&prev),
                    })?;
                    match side {
                        Side::Right => ring.mul(&x, &inv),
                        Side::Left => ring.mul(&inv, &x),
                    }
                }
                Source::Seeded { rec } => {
                    let rec = rec.clone();
                    let k = rec.k();
                    // r_{m+1} from r_m..r_{m−k+1}, m = next_index − 1 ≥ k.
                    let m = next_index - 1;
                    let mut acc = rec.coeff(0, m)?;
                    let mut inv_prod: Option<R::Elem> = None;
                    for j in 1..=k {
                        let inv = Self::inverse_locked(ring, st, m - j + 1, next_index)?;
                        inv_prod = Some(match inv_prod {
                            None => inv,
                            Some(p) => ring.mul(&p, &inv),
                        });
                        let a = rec.coeff(j, m)?;
                        acc = ring.add(&acc, &ring.mul(&a, inv_prod.as_ref().expect("set above")));
                    }
                    acc
                }
            };
            st.terms.push(next);
            st.inverses.push(None);
        }
        Ok(())
    }
}

/// Both sides of the characteristic equation at n for the window
/// (r_{n−k+1}, …, r_{n+1}): the full product, and Σ_j a_{j,n}·∏_{i=j}^{k−1} r_{n−i} + a_{k,n}.
fn char_sides<R: Ring>(rec: &LinearRecurrence<R>, window: &[R::Elem], n: usize) -> Result<(R::Elem, R::Elem)> {
    let ring = &rec.ring;
    let k = rec.k();
    if window.len() != k + 1 {
        return Err(Error::InvalidValue(format!(
            "window of length {} for a recurrence of order {}",
            window.len(),
            k + 1
        )));
    }
    let lhs = product(ring, window);
    let mut rhs = rec.coeff(k, n)?;
    for j in 0..k {
        // ∏_{i=j}^{k−1} r_{n−i} = window[0..=k−1−j]
        let p = product(ring, &window[..k - j]);
        rhs = ring.add(&rhs, &ring.mul(&rec.coeff(j, n)?, &p));
    }
    Ok((lhs, rhs))
}

/// Left side minus right side of the characteristic equation at n for the
/// window (r_{n−k+1}, …, r_{n+1}). Uses no inverses.
pub fn char_residual<R: Ring>(rec: &LinearRecurrence<R>, window: &[R::Elem], n: usize) -> Result<R::Elem> {
    let (lhs, rhs) = char_sides(rec, window, n)?;
    Ok(rec.ring.sub(&lhs, &rhs))
}

fn window_at<R: Ring>(rec: &LinearRecurrence<R>, e: &Eigensequence<R>, n: usize) -> Result<Vec<R::Elem>> {
    let k = rec.k();
    (n + 1 - k..=n + 1).map(|i| e.term(i)).collect()
}

/// Characteristic residual of `e` at n (n ≥ k); zero iff the window is consistent.
pub fn residual_at<R: Ring>(rec: &LinearRecurrence<R>, e: &Eigensequence<R>, n: usize) -> Result<R::Elem> {
    char_residual(rec, &window_at(rec, e, n)?, n)
}

/// Fail with NotAnEigensequence unless both sides of the characteristic
/// equation agree at n (relative tolerance on float kinds).
pub fn verify_at<R: Ring>(rec: &LinearRecurrence<R>, e: &Eigensequence<R>, n: usize) -> Result<()> {
    let ring = &rec.ring;
    let (lhs, rhs) = char_sides(rec, &window_at(rec, e, n)?, n)?;
    if ring.equal(&lhs, &rhs) {
        Ok(())
    } else {
        Err(Error::NotAnEigensequence { n, residual: ring.format(&ring.sub(&lhs, &rhs)) })
    }
}

/// Eigensequence generated from seeds r_1..r_k, materialized through `horizon`.
pub fn eigenseq_from_seed<R: Ring>(
    rec: &LinearRecurrence<R>,
    seeds: Vec<R::Elem>,
    horizon: usize,
) -> Result<Arc<Eigensequence<R>>> {
    let ring = rec.ring.clone();
    ring.try_one()?;
    let k = rec.k();
    if seeds.len() != k {
        return Err(Error::InvalidValue(format!(
            "order {} needs exactly {k} seed(s), got {}",
            k + 1,
            seeds.len()
        )));
    }
    for (i, s) in seeds.iter().enumerate() {
        let class = ring.classify(s);
        if class != ElementClass::Unit {
            return Err(Error::NonUnitTerm { n: k + 1, culprit: i + 1, class });
        }
    }
    let e = Eigensequence::with_source(
        ring,
        "seeded",
        Source::Seeded { rec: Arc::new(rec.homogeneous()) },
        seeds,
    );
    e.prefix(horizon)?;
    Ok(Arc::new(e))
}

/// Ratio sequence of a unitary solution. Terms already computed in the stream
/// are converted eagerly so non-unit terms surface immediately.
pub fn eigenseq_from_unitary<R: Ring>(stream: SolutionStream<R>, side: Side) -> Result<Arc<Eigensequence<R>>> {
    let ring = stream.ring().clone();
    let have = stream.terms().len();
    let e = Eigensequence::with_source(ring, "ratios", Source::Ratios { stream, side }, Vec::new());
    e.prefix(have.saturating_sub(1))?;
    Ok(Arc::new(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenVerdict {
    Unitary,
    Improper,
    ProperNonUnitary,
    Undecidable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub class: ElementClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EigenClassification {
    pub verdict: EigenVerdict,
    /// First term responsible for the verdict.
    pub witness: Option<Witness>,
}

/// Classify r_1..r_{up_to}. Any zero divisor (zero included) makes the sequence improper.
pub fn classify_eigenseq<R: Ring>(e: &Eigensequence<R>, up_to: usize) -> Result<EigenClassification> {
    let terms = e.prefix(up_to)?;
    let mut non_unit = None;
    let mut undecidable = None;
    for (i, r) in terms.iter().enumerate() {
        let w = Witness { n: i + 1, class: e.ring.classify(r) };
        match w.class {
            ElementClass::Zero | ElementClass::ZeroDivisor => {
                return Ok(EigenClassification { verdict: EigenVerdict::Improper, witness: Some(w) })
            }
            ElementClass::NonUnitRegular => {
                non_unit.get_or_insert(w);
            }
            ElementClass::Undecidable => {
                undecidable.get_or_insert(w);
            }
            ElementClass::Unit => {}
        }
    }
    Ok(match (non_unit, undecidable) {
        (Some(w), _) => EigenClassification { verdict: EigenVerdict::ProperNonUnitary, witness: Some(w) },
        (None, Some(w)) => EigenClassification { verdict: EigenVerdict::Undecidable, witness: Some(w) },
        (None, None) => EigenClassification { verdict: EigenVerdict::Unitary, witness: None },
    })
}

/// Eigenvalues of a constant-coefficient recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueReport<E> {
    pub roots: Vec<E>,
    /// True when the characteristic polynomial splits into linear factors over the ring.
    pub complete: bool,
    pub notes: Vec<String>,
}

/// Coefficients of r^{k+1} − a_0 r^k − ⋯ − a_k, lowest degree first.
pub fn char_polynomial<R: Ring>(ring: &R, coeffs: &[R::Elem]) -> Vec<R::Elem> {
    let mut poly: Vec<R::Elem> = coeffs.iter().rev().map(|a| ring.neg(a)).collect();
    poly.push(ring.one());
    poly
}

fn constant_coeffs<R: Ring>(rec: &LinearRecurrence<R>) -> Result<Vec<R::Elem>> {
    rec.coeffs
        .iter()
        .map(|c| {
            c.as_constant()
                .cloned()
                .ok_or_else(|| Error::InvalidRecurrence("eigenvalues need constant coefficients".into()))
        })
        .collect()
}

/// Roots of the characteristic polynomial by exhaustion (finite rings), the
/// rational-root test (ℤ, ℚ) or the quadratic formula (degree ≤ 2).
pub fn eigenvalues_constant<R: Ring>(rec: &LinearRecurrence<R>) -> Result<EigenvalueReport<R::Elem>> {
    let ring = &rec.ring;
    let coeffs = constant_coeffs(rec)?;
    let poly = char_polynomial(ring, &coeffs);
    if ring.elements().is_some() {
        let roots = brute_force_roots(ring, &poly)?;
        let complete = splits_over_finite(ring, &poly, &roots);
        return Ok(EigenvalueReport { roots, complete, notes: Vec::new() });
    }
    if matches!(ring.descriptor(), RingDescriptor::Integer | RingDescriptor::Rational) {
        let qpoly: Option<Vec<BigRational>> = poly.iter().map(|c| ring.to_rational(c)).collect();
        if let Some(qpoly) = qpoly {
            let (qroots, rest, notes) = rational_roots(&qpoly);
            let roots = qroots
                .iter()
                .map(|q| ring.from_rational(q))
                .collect::<Result<Vec<_>>>()?;
            return Ok(EigenvalueReport { roots, complete: rest.len() == 1, notes });
        }
    }
    match poly.len() {
        2 => Ok(EigenvalueReport { roots: vec![ring.neg(&poly[0])], complete: true, notes: Vec::new() }),
        3 => {
            let res = quadratic_roots(ring, &poly[2], &poly[1], &poly[0])?;
            Ok(match res {
                RootResult::TwoRoots(a, b) => EigenvalueReport { roots: vec![a, b], complete: true, notes: vec![] },
                RootResult::DoubleRoot(a) => EigenvalueReport {
                    roots: vec![a],
                    complete: true,
                    notes: vec!["double root".into()],
                },
                RootResult::ConjugatePair { .. } => EigenvalueReport {
                    roots: vec![],
                    complete: false,
                    notes: vec!["complex pair".into()],
                },
                RootResult::Mixed(_) => EigenvalueReport {
                    roots: vec![],
                    complete: false,
                    notes: vec!["discriminant changes sign across the grid".into()],
                },
                RootResult::NoRoots(why) => EigenvalueReport { roots: vec![], complete: false, notes: vec![why] },
                RootResult::RingExtensionRoots { field, .. } => EigenvalueReport {
                    roots: vec![],
                    complete: false,
                    notes: vec![format!("roots lie in {}", field.descriptor())],
                },
                RootResult::Degenerate(Degenerate::Root(a)) => {
                    EigenvalueReport { roots: vec![a], complete: true, notes: vec![] }
                }
                RootResult::Degenerate(_) => unreachable!("characteristic polynomial is monic"),
            })
        }
        d => Ok(EigenvalueReport {
            roots: vec![],
            complete: false,
            notes: vec![format!("no root finder for degree {} over {}", d - 1, ring.descriptor())],
        }),
    }
}

/// Whether the roots found (with multiplicity by repeated division) account for the full degree.
fn splits_over_finite<R: Ring>(ring: &R, poly: &[R::Elem], roots: &[R::Elem]) -> bool {
    if !ring.is_field() {
        // Factorization is not unique over rings with zero divisors; report the degree test only.
        return roots.len() >= poly.len() - 1;
    }
    let mut p = poly.to_vec();
    loop {
        if p.len() == 1 {
            return true;
        }
        match roots.iter().find(|r| ring.is_zero(&poly_eval(ring, &p, r))) {
            Some(r) => p = deflate(ring, &p, r),
            None => return false,
        }
    }
}

/// Quotient of p by (x − r), p(r) = 0 assumed.
fn deflate<R: Ring>(ring: &R, p: &[R::Elem], r: &R::Elem) -> Vec<R::Elem> {
    let d = p.len() - 1;
    let mut q = vec![ring.zero(); d];
    let mut carry = ring.zero();
    for i in (1..=d).rev() {
        carry = ring.add(&p[i], &ring.mul(&carry, r));
        q[i - 1] = carry.clone();
    }
    q
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    let small = n.to_u64().filter(|&v| v <= 1_000_000_000_000)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= small {
        if small % d == 0 {
            out.push(BigInt::from(d));
            if d * d != small {
                out.push(BigInt::from(small / d));
            }
        }
        d += 1;
    }
    Some(out)
}

/// Rational roots with multiplicity, the unfactored remainder and notes about it.
fn rational_roots(poly: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>, Vec<String>) {
    let q = Rationals;
    let mut roots = Vec::new();
    let mut notes = Vec::new();
    let mut p = poly.to_vec();
    'outer: while p.len() > 1 {
        if p[0].is_zero() {
            roots.push(BigRational::zero());
            p.remove(0);
            continue;
        }
        let lcm = p.iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(&ints[ints.len() - 1])) else {
            notes.push("coefficients too large for the rational-root test".into());
            break;
        };
        let mut candidates: Vec<BigRational> = Vec::new();
        for a in &ps {
            for b in &qs {
                for s in [1, -1] {
                    let c = BigRational::new(a * s, b.clone());
                    if !candidates.contains(&c) {
                        candidates.push(c);
                    }
                }
            }
        }
        candidates.sort();
        for c in candidates {
            if poly_eval(&q, &p, &c).is_zero() {
                p = deflate(&q, &p, &c);
                roots.push(c);
                continue 'outer;
            }
        }
        break;
    }
    roots.sort();
    match p.len() {
        1 => {}
        3 => match quadratic_roots(&q, &p[2], &p[1], &p[0]) {
            Ok(RootResult::RingExtensionRoots { field, roots: pair }) => {
                let k = field;
                let what = if k.d() < 0 { "complex pair" } else { "irrational pair" };
                notes.push(format!("{what} {} and {}", k.format(&pair[0]), k.format(&pair[1])));
            }
            _ => notes.push("unresolved quadratic factor".into()),
        },
        n => notes.push(format!("no rational roots of the remaining degree-{} factor", n - 1)),
    }
    (roots, p, notes)
}

/// Outcome of comparing two unitary sequences up to a unit factor.
#[derive(Debug, Clone, PartialEq)]
pub enum Equivalence<E> {
    /// y_n = x_n·u for every compared n.
    Equivalent(E),
    /// Ratios first differ at n.
    NotEquivalent { n: usize },
    /// A term of one of the sequences is not a unit.
    NotUnitary { sequence: char, n: usize },
}

/// Right equivalence: y_n = x_n·u for a unit u, decided by comparing ratio sequences.
pub fn right_equivalent<R: Ring>(ring: &R, x: &[R::Elem], y: &[R::Elem], up_to: usize) -> Result<Equivalence<R::Elem>> {
    let m = up_to.min(x.len().saturating_sub(1)).min(y.len().saturating_sub(1));
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidValue("sequences must be nonempty".into()));
    }
    let mut xinv = Vec::with_capacity(m + 1);
    for (name, seq) in [('x', x), ('y', y)] {
        for (n, v) in seq[..=m].iter().enumerate() {
            match ring.inverse(v) {
                Ok(inv) if name == 'x' => xinv.push(inv),
                Ok(_) => {}
                Err(_) => return Ok(Equivalence::NotUnitary { sequence: name, n }),
            }
        }
    }
    let yinv: Vec<R::Elem> = y[..=m].iter().map(|v| ring.inverse(v)).collect::<Result<_>>()?;
    for n in 1..=m {
        let rx = ring.mul(&x[n], &xinv[n - 1]);
        let ry = ring.mul(&y[n], &yinv[n - 1]);
        if !ring.equal(&rx, &ry) {
            return Ok(Equivalence::NotEquivalent { n });
        }
    }
    let u = ring.mul(&xinv[0], &y[0]);
    for n in 0..=m {
        if !ring.equal(&ring.mul(&x[n], &u), &y[n]) {
            return Ok(Equivalence::NotEquivalent { n });
        }
    }
    Ok(Equivalence::Equivalent(u))
}

/// Convergence of a seeded eigensequence towards the limiting eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct PPReport<E> {
    pub limiting_eigenvalues: Vec<E>,
    pub eigenvalue_notes: Vec<String>,
    /// max_j |a_{j,n} − a_j| at n = horizon.
    pub coefficient_gap: E,
    /// (n, r_n) for n in the trailing window.
    pub tail: Vec<(usize, E)>,
    /// Limiting eigenvalue closest to the tail, if within tolerance.
    pub converged_to: Option<E>,
    /// max |r_n − λ| over the tail for the closest λ.
    pub max_deviation: Option<E>,
}

/// Generate the eigensequence from `seeds` through `horizon` and test whether
/// r_n stays within `tol` of a root of the limiting characteristic polynomial
/// for every n in [tail_start, horizon].
pub fn poincare_perron_check<R: Ring>(
    rec: &LinearRecurrence<R>,
    seeds: Vec<R::Elem>,
    limits: Vec<R::Elem>,
    horizon: usize,
    tail_start: usize,
    tol: R::Elem,
) -> Result<PPReport<R::Elem>> {
    let ring = &rec.ring;
    if ring.compare(&ring.zero(), &ring.zero()).is_none() {
        return Err(Error::Type(format!("{} is not an ordered field", ring.descriptor())));
    }
    if limits.len() != rec.order() {
        return Err(Error::InvalidValue(format!("{} limiting coefficients for order {}", limits.len(), rec.order())));
    }
    if tail_start == 0 || tail_start > horizon {
        return Err(Error::InvalidValue(format!("tail start {tail_start} must lie in 1..={horizon}")));
    }
    let limit_rec = LinearRecurrence::constant(ring.clone(), limits.clone(), vec![ring.zero(); limits.len()])?;
    let eig = eigenvalues_constant(&limit_rec)?;
    let mut gap = ring.zero();
    for (j, a) in limits.iter().enumerate() {
        let d = abs(ring, &ring.sub(&rec.coeff(j, horizon)?, a))?;
        if ring.compare(&d, &gap) == Some(Ordering::Greater) {
            gap = d;
        }
    }
    let e = eigenseq_from_seed(rec, seeds, horizon)?;
    let terms = e.prefix(horizon)?;
    let tail: Vec<(usize, R::Elem)> = (tail_start..=horizon).map(|n| (n, terms[n - 1].clone())).collect();
    let mut best: Option<(R::Elem, R::Elem)> = None;
    for lambda in &eig.roots {
        let mut dev = ring.zero();
        for (_, r) in &tail {
            let d = abs(ring, &ring.sub(r, lambda))?;
            if ring.compare(&d, &dev) == Some(Ordering::Greater) {
                dev = d;
            }
        }
        let better = match &best {
            None => true,
            Some((_, b)) => ring.compare(&dev, b) == Some(Ordering::Less),
        };
        if better {
            best = Some((lambda.clone(), dev));
        }
    }
    let converged_to = best
        .as_ref()
        .filter(|(_, dev)| ring.compare(dev, &tol) != Some(Ordering::Greater))
        .map(|(l, _)| l.clone());
    Ok(PPReport {
        limiting_eigenvalues: eig.roots,
        eigenvalue_notes: eig.notes,
        coefficient_gap: gap,
        tail,
        converged_to,
        max_deviation: best.map(|(_, d)| d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoefficientSequence;
    use crate::recurrence::iterate;
    use crate::ring::{Integers, RealField, Zmod};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qi(n: i64) -> BigRational {
        q(n, 1)
    }

    fn exz<R: Ring>(ring: R) -> LinearRecurrence<R> {
        let c = vec![ring.from_i64(2), ring.from_i64(-4)];
        let i = vec![ring.one(), ring.one()];
        LinearRecurrence::constant(ring, c, i).unwrap()
    }

    fn fib<R: Ring>(ring: R) -> LinearRecurrence<R> {
        let c = vec![ring.one(), ring.one()];
        let i = vec![ring.zero(), ring.one()];
        LinearRecurrence::constant(ring, c, i).unwrap()
    }

    #[test]
    fn residuals() {
        let rec = exz(Integers);
        let w = |a: i64, b: i64| vec![BigInt::from(a), BigInt::from(b)];
        for (a, b) in [(1, -2), (-2, 4), (4, 1)] {
            assert!(char_residual(&rec, &w(a, b), 5).unwrap().is_zero());
        }
        assert_eq!(char_residual(&fib(Integers), &w(1, 1), 0).unwrap(), BigInt::from(-1));
        assert!(char_residual(&rec, &w(1, 1)[..1], 0).is_err());
    }

    #[test]
    fn fibonacci_ratios() {
        let rec = fib(Rationals);
        let e = eigenseq_from_seed(&rec, vec![qi(1)], 5).unwrap();
        assert_eq!(e.prefix(5).unwrap(), vec![qi(1), qi(2), q(3, 2), q(5, 3), q(8, 5)]);
        let err = eigenseq_from_seed(&fib(Integers), vec![BigInt::from(1)], 5).unwrap_err();
        assert_eq!(err, Error::NonUnitTerm { n: 3, culprit: 2, class: ElementClass::NonUnitRegular });
        let s = iterate(&fib(Rationals).with_initials(vec![qi(1), qi(1)]).unwrap(), 5).unwrap();
        let r = eigenseq_from_unitary(s, Side::Right).unwrap();
        assert_eq!(r.prefix(5).unwrap(), vec![qi(1), qi(2), q(3, 2), q(5, 3), q(8, 5)]);
        for n in 1..5 {
            verify_at(&rec, &r, n).unwrap();
        }
    }

    #[test]
    fn ratios_of_constant_solution() {
        let r = Rationals;
        let rec = LinearRecurrence::constant(r, vec![r.one()], vec![qi(3)]).unwrap();
        let s = iterate(&rec, 4).unwrap();
        let e = eigenseq_from_unitary(s, Side::Left).unwrap();
        assert_eq!(e.prefix(4).unwrap(), vec![qi(1); 4]);
        let e = eigenseq_from_unitary(iterate(&fib(Rationals), 3).unwrap(), Side::Right);
        assert_eq!(e.unwrap_err(), Error::NonUnitTerm { n: 1, culprit: 0, class: ElementClass::Zero });
    }

    #[test]
    fn classification_of_periodic_sequence() {
        let z17 = Zmod::new(17).unwrap();
        let e = Eigensequence::listed(z17, vec![1, z17.from_i64(-2), 4], true).unwrap();
        assert_eq!(classify_eigenseq(&e, 30).unwrap().verdict, EigenVerdict::Unitary);
        let z18 = Zmod::new(18).unwrap();
        let e = Eigensequence::listed(z18, vec![1, z18.from_i64(-2), 4], true).unwrap();
        let c = classify_eigenseq(&e, 30).unwrap();
        assert_eq!(c.verdict, EigenVerdict::Improper);
        assert_eq!(c.witness, Some(Witness { n: 2, class: ElementClass::ZeroDivisor }));
        let e = Eigensequence::listed(Integers, [1, -2, 4].map(BigInt::from).to_vec(), true).unwrap();
        assert_eq!(classify_eigenseq(&e, 30).unwrap().verdict, EigenVerdict::ProperNonUnitary);
        let e = Eigensequence::listed(Integers, vec![BigInt::from(1)], false).unwrap();
        assert_eq!(e.term(2).unwrap_err(), Error::Exhausted(2));
    }

    #[test]
    fn seeded_exz_has_period_three() {
        let e = eigenseq_from_seed(&exz(Rationals), vec![qi(1)], 30).unwrap();
        let t = e.prefix(30).unwrap();
        assert_eq!(&t[..3], &[qi(1), qi(-2), qi(4)]);
        assert!((0..27).all(|i| t[i] == t[i + 3]));
        let z17 = Zmod::new(17).unwrap();
        let e = eigenseq_from_seed(&exz(z17), vec![1], 30).unwrap();
        let t = e.prefix(30).unwrap();
        assert_eq!(&t[..3], &[1, 15, 4]);
        assert!((0..27).all(|i| t[i] == t[i + 3]));
    }

    #[test]
    fn eigenvalues() {
        let r = Rationals;
        let rec = LinearRecurrence::constant(r, vec![qi(0), qi(2), qi(1)], vec![qi(0); 3]).unwrap();
        let rep = eigenvalues_constant(&rec).unwrap();
        assert_eq!(rep.roots, vec![qi(-1)]);
        assert!(!rep.complete);
        let rep = eigenvalues_constant(&exz(Rationals)).unwrap();
        assert!(rep.roots.is_empty());
        assert!(rep.notes[0].starts_with("complex pair"), "{:?}", rep.notes);
        let rec = LinearRecurrence::constant(r, vec![qi(1)], vec![qi(1)]).unwrap();
        assert_eq!(eigenvalues_constant(&rec).unwrap().roots, vec![qi(1)]);
        let z11 = Zmod::new(11).unwrap();
        let rec = LinearRecurrence::constant(z11, vec![0, 2, 1], vec![1, 1, 1]).unwrap();
        let rep = eigenvalues_constant(&rec).unwrap();
        assert_eq!(rep.roots, vec![4, 8, 10]);
        assert!(rep.complete);
        // (r − 1)²(r + 2) = r³ − 3r + 2
        let rec = LinearRecurrence::constant(r, vec![qi(0), qi(3), qi(-2)], vec![qi(0); 3]).unwrap();
        let rep = eigenvalues_constant(&rec).unwrap();
        assert_eq!(rep.roots, vec![qi(-2), qi(1), qi(1)]);
        assert!(rep.complete);
    }

    #[test]
    fn equivalence() {
        let r = Rationals;
        let x: Vec<BigRational> = [1, 1, 2, 3, 5].map(qi).to_vec();
        let y: Vec<BigRational> = x.iter().map(|v| v * qi(3)).collect();
        assert_eq!(right_equivalent(&r, &x, &y, 4).unwrap(), Equivalence::Equivalent(qi(3)));
        assert_eq!(right_equivalent(&r, &x, &x, 4).unwrap(), Equivalence::Equivalent(qi(1)));
        let lucas: Vec<BigRational> = [1, 3, 4, 7, 11].map(qi).to_vec();
        assert_eq!(right_equivalent(&r, &x, &lucas, 4).unwrap(), Equivalence::NotEquivalent { n: 1 });
        let mut z = y.clone();
        z[3] = qi(10);
        assert_eq!(right_equivalent(&r, &x, &z, 4).unwrap(), Equivalence::NotEquivalent { n: 3 });
        let zeros = vec![qi(0), qi(1)];
        assert_eq!(right_equivalent(&r, &zeros, &x, 1).unwrap(), Equivalence::NotUnitary { sequence: 'x', n: 0 });
    }

    #[test]
    fn poincare_perron() {
        let r = Rationals;
        let a0 = CoefficientSequence::formula("1/n", &r).unwrap();
        let rec = LinearRecurrence::new(r, vec![a0, CoefficientSequence::Constant(qi(1))], CoefficientSequence::Constant(qi(0)), vec![qi(0), qi(1)])
            .unwrap();
        let rep = poincare_perron_check(&rec, vec![qi(1)], vec![qi(0), qi(1)], 200, 49, q(1, 49)).unwrap();
        assert_eq!(rep.limiting_eigenvalues, vec![qi(-1), qi(1)]);
        assert_eq!(rep.converged_to, Some(qi(1)));
        assert_eq!(rep.max_deviation, Some(q(1, 49)));
        assert_eq!(rep.coefficient_gap, q(1, 200));

        let re = RealField::<f64>::default();
        let rep = poincare_perron_check(&exz(re), vec![1.0], vec![2.0, -4.0], 60, 30, 1e-6).unwrap();
        assert!(rep.converged_to.is_none());
        assert!(rep.limiting_eigenvalues.is_empty());

        // Seeded at the eigenvalue 2 of r² − r − 2.
        let rec = LinearRecurrence::constant(r, vec![qi(1), qi(2)], vec![qi(1), qi(1)]).unwrap();
        let rep = poincare_perron_check(&rec, vec![qi(2)], vec![qi(1), qi(2)], 20, 1, qi(0)).unwrap();
        assert_eq!(rep.converged_to, Some(qi(2)));
        assert_eq!(rep.max_deviation, Some(qi(0)));

        let z7 = Zmod::new(7).unwrap();
        assert!(matches!(poincare_perron_check(&exz(z7), vec![1], vec![2, 3], 10, 1, 0), Err(Error::Type(_))));
    }
}
