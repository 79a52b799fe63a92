//! Period-p eigensequences of x_{n+1} = a_n·x_n + b_n·x_{n−1} with periodic
//! coefficients. With α_{j+1} = a_jα_j + b_jα_{j−1} (α₀ = 0, α₁ = 1) and β
//! the same recurrence from (β₀, β₁) = (1, 0), any root r₁ of
//!
//!   α_p·r² + (β_p − α_{p+1})·r − β_{p+1}
//!
//! generates r_{j+1} = a_j + b_j·r_j⁻¹ with r_{p+1} = r₁.

use std::sync::Arc;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::coeff::CoefficientSequence;
use crate::eigen::{char_residual, Eigensequence};
use crate::error::{Error, Result};
use crate::recurrence::LinearRecurrence;
use crate::ring::roots::{brute_force_roots, quadratic_roots, Degenerate, RootResult};
use crate::ring::{ElementClass, QuadraticField, Ring};

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBetaTable<E> {
    pub p: usize,
    /// α_0..α_{p+1}
    pub alpha: Vec<E>,
    /// β_0..β_{p+1}
    pub beta: Vec<E>,
    /// a_0..a_{p+1}
    pub a: Vec<E>,
    /// b_0..b_{p+1}
    pub b: Vec<E>,
}

/// lcm of the declared periods of a and b.
pub fn common_period<R: Ring>(a: &CoefficientSequence<R>, b: &CoefficientSequence<R>) -> Result<usize> {
    match (a.period(), b.period()) {
        (Some(p), Some(q)) => Ok(p.lcm(&q)),
        _ => Err(Error::InvalidRecurrence("coefficients must be constant or periodic".into())),
    }
}

pub fn alpha_beta<R: Ring>(ring: &R, a: &CoefficientSequence<R>, b: &CoefficientSequence<R>) -> Result<AlphaBetaTable<R::Elem>> {
    let p = common_period(a, b)?;
    let one = ring.try_one()?;
    let av: Vec<R::Elem> = (0..=p + 1).map(|n| a.eval(ring, n)).collect::<Result<_>>()?;
    let bv: Vec<R::Elem> = (0..=p + 1).map(|n| b.eval(ring, n)).collect::<Result<_>>()?;
    let column = |first: R::Elem, second: R::Elem| {
        let mut c = vec![first, second];
        for j in 1..=p {
            let next = ring.add(&ring.mul(&av[j], &c[j]), &ring.mul(&bv[j], &c[j - 1]));
            c.push(next);
        }
        c
    };
    Ok(AlphaBetaTable {
        p,
        alpha: column(ring.zero(), one.clone()),
        beta: column(one, ring.zero()),
        a: av,
        b: bv,
    })
}

/// (α_p, β_p − α_{p+1}, −β_{p+1}), highest degree first.
pub fn periodic_quadratic<R: Ring>(ring: &R, t: &AlphaBetaTable<R::Elem>) -> [R::Elem; 3] {
    let p = t.p;
    [
        t.alpha[p].clone(),
        ring.sub(&t.beta[p], &t.alpha[p + 1]),
        ring.neg(&t.beta[p + 1]),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateVerdict {
    Success,
    /// r_n is not a unit, so r_{n+1} cannot be formed.
    NonUnit { n: usize, class: ElementClass },
    NotClosed,
    ResidualNonzero { n: usize },
}

/// L_j = α_j·r₁ + β_j together with the checks L_{j+1} = a_jL_j + b_jL_{j−1}
/// and (r₁ − a_p)·L_p = b_p·L_{p−1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LWitness<E> {
    pub values: Vec<E>,
    pub recurrence_holds: bool,
    pub closure_holds: bool,
}

pub struct PeriodicCandidate<S: Ring> {
    pub r1: S::Elem,
    /// r_1..r_{p+1}, as far as they could be generated.
    pub terms: Vec<S::Elem>,
    pub verdict: CandidateVerdict,
    /// ∏_{j=1}^{p} (−b_j·r_j⁻¹).
    pub rho: Option<S::Elem>,
    pub witness: LWitness<S::Elem>,
    /// The periodic eigensequence, for successful candidates.
    pub eigenseq: Option<Arc<Eigensequence<S>>>,
}

impl<S: Ring> std::fmt::Debug for PeriodicCandidate<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicCandidate")
            .field("r1", &self.r1)
            .field("terms", &self.terms)
            .field("verdict", &self.verdict)
            .field("rho", &self.rho)
            .field("witness", &self.witness)
            .finish()
    }
}

#[derive(Debug)]
pub enum PeriodicOutcome<R: Ring> {
    InRing(Vec<PeriodicCandidate<R>>),
    /// Roots lie in a quadratic extension; the recurrence was lifted there.
    Extended {
        field: QuadraticField,
        rec: LinearRecurrence<QuadraticField>,
        candidates: Vec<PeriodicCandidate<QuadraticField>>,
    },
    NoRoots(String),
}

#[derive(Debug)]
pub struct PeriodicSearch<R: Ring> {
    pub table: AlphaBetaTable<R::Elem>,
    /// Highest degree first.
    pub quadratic: [R::Elem; 3],
    pub outcome: PeriodicOutcome<R>,
}

impl<R: Ring> PeriodicSearch<R> {
    /// True when some candidate is a verified period-p eigensequence.
    pub fn found(&self) -> bool {
        match &self.outcome {
            PeriodicOutcome::InRing(c) => c.iter().any(|c| c.verdict == CandidateVerdict::Success),
            PeriodicOutcome::Extended { candidates, .. } => {
                candidates.iter().any(|c| c.verdict == CandidateVerdict::Success)
            }
            PeriodicOutcome::NoRoots(_) => false,
        }
    }

    pub fn to_json(&self, ring: &R) -> Value {
        let v = |xs: &[R::Elem]| xs.iter().map(|x| ring.to_json(x)).collect::<Vec<_>>();
        let (working, candidates, note) = match &self.outcome {
            PeriodicOutcome::InRing(c) => (ring.descriptor().to_string(), candidates_json(ring, c), Value::Null),
            PeriodicOutcome::Extended { field, candidates, .. } => {
                (field.descriptor().to_string(), candidates_json(field, candidates), Value::Null)
            }
            PeriodicOutcome::NoRoots(why) => (ring.descriptor().to_string(), Vec::new(), json!(why)),
        };
        json!({
            "period": self.table.p,
            "alpha": v(&self.table.alpha),
            "beta": v(&self.table.beta),
            "quadratic": v(&self.quadratic),
            "working_ring": working,
            "candidates": candidates,
            "note": note,
        })
    }
}

fn candidates_json<S: Ring>(ring: &S, cs: &[PeriodicCandidate<S>]) -> Vec<Value> {
    cs.iter()
        .map(|c| {
            let verdict = match &c.verdict {
                CandidateVerdict::Success => json!({"verdict": "success"}),
                CandidateVerdict::NonUnit { n, class } => json!({"verdict": "non_unit", "n": n, "class": class}),
                CandidateVerdict::NotClosed => json!({"verdict": "not_closed"}),
                CandidateVerdict::ResidualNonzero { n } => json!({"verdict": "residual_nonzero", "n": n}),
            };
            json!({
                "r1": ring.to_json(&c.r1),
                "terms": c.terms.iter().map(|x| ring.to_json(x)).collect::<Vec<_>>(),
                "result": verdict,
                "rho": c.rho.as_ref().map(|x| ring.to_json(x)),
                "witness": {
                    "L": c.witness.values.iter().map(|x| ring.to_json(x)).collect::<Vec<_>>(),
                    "recurrence_holds": c.witness.recurrence_holds,
                    "closure_holds": c.witness.closure_holds,
                },
            })
        })
        .collect()
}

fn check_candidate<S: Ring>(rec: &LinearRecurrence<S>, table: &AlphaBetaTable<S::Elem>, r1: S::Elem) -> Result<PeriodicCandidate<S>> {
    let ring = &rec.ring;
    let p = table.p;
    let (a, b) = (&table.a, &table.b);
    let l: Vec<S::Elem> = (0..=p + 1)
        .map(|j| ring.add(&ring.mul(&table.alpha[j], &r1), &table.beta[j]))
        .collect();
    let recurrence_holds =
        (1..=p).all(|j| ring.equal(&l[j + 1], &ring.add(&ring.mul(&a[j], &l[j]), &ring.mul(&b[j], &l[j - 1]))));
    let closure_holds = ring.equal(&ring.mul(&ring.sub(&r1, &a[p]), &l[p]), &ring.mul(&b[p], &l[p - 1]));
    let witness = LWitness { values: l, recurrence_holds, closure_holds };

    let mut terms = vec![r1.clone()];
    let mut rho: Option<S::Elem> = None;
    for j in 1..=p {
        let rj = &terms[j - 1];
        let inv = match ring.inverse(rj) {
            Ok(v) => v,
            Err(_) => {
                let class = ring.classify(rj);
                return Ok(PeriodicCandidate {
                    r1,
                    terms,
                    verdict: CandidateVerdict::NonUnit { n: j, class },
                    rho: None,
                    witness,
                    eigenseq: None,
                });
            }
        };
        let factor = ring.neg(&ring.mul(&b[j], &inv));
        rho = Some(match rho {
            None => factor,
            Some(r) => ring.mul(&r, &factor),
        });
        let next = ring.add(&a[j], &ring.mul(&b[j], &inv));
        terms.push(next);
    }
    let mut verdict = if ring.equal(&terms[p], &r1) { CandidateVerdict::Success } else { CandidateVerdict::NotClosed };
    if verdict == CandidateVerdict::Success {
        for j in 1..=p {
            if !ring.is_zero(&char_residual(rec, &terms[j - 1..=j], j)?) {
                verdict = CandidateVerdict::ResidualNonzero { n: j };
                break;
            }
        }
    }
    let eigenseq = if verdict == CandidateVerdict::Success {
        Some(Arc::new(Eigensequence::listed(ring.clone(), terms[..p].to_vec(), true)?))
    } else {
        None
    };
    Ok(PeriodicCandidate { r1, terms, verdict, rho, witness, eigenseq })
}

fn check_all<S: Ring>(rec: &LinearRecurrence<S>, table: &AlphaBetaTable<S::Elem>, roots: Vec<S::Elem>) -> Result<Vec<PeriodicCandidate<S>>> {
    let mut out: Vec<PeriodicCandidate<S>> =
        roots.into_iter().map(|r| check_candidate(rec, table, r)).collect::<Result<_>>()?;
    out.sort_by_key(|c| c.verdict != CandidateVerdict::Success);
    Ok(out)
}

/// Search for period-p eigensequences of an order-2 recurrence with periodic
/// coefficients. Roots come from exhaustion on finite rings and from the
/// quadratic formula otherwise; over ℤ and ℚ, irrational roots move the search
/// into the quadratic field that contains them.
pub fn find_periodic_eigenseq<R: Ring>(rec: &LinearRecurrence<R>) -> Result<PeriodicSearch<R>> {
    let ring = &rec.ring;
    if rec.order() != 2 {
        return Err(Error::InvalidRecurrence(format!("periodic search needs order 2, got {}", rec.order())));
    }
    let table = alpha_beta(ring, &rec.coeffs[0], &rec.coeffs[1])?;
    let quadratic = periodic_quadratic(ring, &table);
    let p = table.p;
    let [c2, c1, c0] = quadratic.clone();
    let no_period = format!("degenerate quadratic: no period-{p} eigensequence");
    let outcome = if ring.elements().is_some() {
        let roots = brute_force_roots(ring, &[c0, c1, c2])?;
        if roots.is_empty() {
            PeriodicOutcome::NoRoots(format!("the quadratic has no roots in {}", ring.descriptor()))
        } else {
            PeriodicOutcome::InRing(check_all(rec, &table, roots)?)
        }
    } else {
        match quadratic_roots(ring, &c2, &c1, &c0)? {
            RootResult::TwoRoots(x, y) => PeriodicOutcome::InRing(check_all(rec, &table, vec![x, y])?),
            RootResult::DoubleRoot(x) | RootResult::Degenerate(Degenerate::Root(x)) => {
                PeriodicOutcome::InRing(check_all(rec, &table, vec![x])?)
            }
            RootResult::Degenerate(Degenerate::AllElements) => {
                PeriodicOutcome::InRing(check_all(rec, &table, vec![ring.one()])?)
            }
            RootResult::Degenerate(Degenerate::Inconsistent) => PeriodicOutcome::NoRoots(no_period),
            RootResult::RingExtensionRoots { field, roots } => {
                let to_field = |x: &R::Elem| -> Result<crate::ring::Quad> {
                    ring.to_rational(x)
                        .map(|q| field.lift(&q))
                        .ok_or_else(|| Error::Type(format!("{} does not embed in {}", ring.format(x), field.descriptor())))
                };
                let lift_seq = |s: &CoefficientSequence<R>| -> Result<CoefficientSequence<QuadraticField>> {
                    let values = (0..p).map(|n| to_field(&s.eval(ring, n)?)).collect::<Result<Vec<_>>>()?;
                    CoefficientSequence::periodic(values, 0)
                };
                let lifted = LinearRecurrence::new(
                    field.clone(),
                    rec.coeffs.iter().map(lift_seq).collect::<Result<_>>()?,
                    lift_forcing(ring, &rec.forcing, &field)?,
                    rec.initials.iter().map(to_field).collect::<Result<_>>()?,
                )?;
                let lt = AlphaBetaTable {
                    p,
                    alpha: table.alpha.iter().map(to_field).collect::<Result<_>>()?,
                    beta: table.beta.iter().map(to_field).collect::<Result<_>>()?,
                    a: table.a.iter().map(to_field).collect::<Result<_>>()?,
                    b: table.b.iter().map(to_field).collect::<Result<_>>()?,
                };
                let candidates = check_all(&lifted, &lt, roots.to_vec())?;
                PeriodicOutcome::Extended { field, rec: lifted, candidates }
            }
            RootResult::ConjugatePair { .. } => PeriodicOutcome::NoRoots("the quadratic has a complex pair of roots".into()),
            RootResult::Mixed(_) => PeriodicOutcome::NoRoots("the discriminant changes sign across the grid".into()),
            RootResult::NoRoots(why) => PeriodicOutcome::NoRoots(why),
        }
    };
    Ok(PeriodicSearch { table, quadratic, outcome })
}

fn lift_forcing<R: Ring>(ring: &R, b: &CoefficientSequence<R>, field: &QuadraticField) -> Result<CoefficientSequence<QuadraticField>> {
    let conv = {
        let ring = ring.clone();
        let field = field.clone();
        Arc::new(move |x: &R::Elem| -> Result<crate::ring::Quad> {
            ring.to_rational(x)
                .map(|q| field.lift(&q))
                .ok_or_else(|| Error::Type(format!("{} does not embed in {}", ring.format(x), field.descriptor())))
        })
    };
    b.lift::<QuadraticField>(ring, conv)
}
