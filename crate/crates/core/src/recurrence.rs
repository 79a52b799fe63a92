//! Linear recurrences x_{n+1} = Σ_j a_{j,n}·x_{n−j} + b_n and their forward solutions.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::coeff::CoefficientSequence;
use crate::error::{Error, Result};
use crate::ring::{ElementClass, Ring};

/// A recurrence of order k+1 with initial values x_0..x_k.
///
/// The recurrence first fires at n = k, producing x_{k+1}. `start_index`
/// only shifts how indices are reported.
#[derive(Clone, Debug)]
pub struct LinearRecurrence<R: Ring> {
    pub ring: R,
    pub coeffs: Vec<CoefficientSequence<R>>,
    pub forcing: CoefficientSequence<R>,
    pub initials: Vec<R::Elem>,
    pub start_index: i64,
}

impl<R: Ring> LinearRecurrence<R> {
    pub fn new(
        ring: R,
        coeffs: Vec<CoefficientSequence<R>>,
        forcing: CoefficientSequence<R>,
        initials: Vec<R::Elem>,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidRecurrence("at least one coefficient sequence is required".into()));
        }
        if initials.len() != coeffs.len() {
            return Err(Error::InvalidRecurrence(format!(
                "order {} needs {} initial values, got {}",
                coeffs.len(),
                coeffs.len(),
                initials.len()
            )));
        }
        Ok(LinearRecurrence { ring, coeffs, forcing, initials, start_index: 0 })
    }

    /// Homogeneous recurrence with constant coefficients.
    pub fn constant(ring: R, coeffs: Vec<R::Elem>, initials: Vec<R::Elem>) -> Result<Self> {
        let zero = ring.zero();
        Self::new(
            ring,
            coeffs.into_iter().map(CoefficientSequence::Constant).collect(),
            CoefficientSequence::Constant(zero),
            initials,
        )
    }

    /// Order k+1.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// k = order − 1, the index at which the recurrence first fires.
    pub fn k(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn homogeneous(&self) -> Self {
        LinearRecurrence {
            forcing: CoefficientSequence::Constant(self.ring.zero()),
            ..self.clone()
        }
    }

    pub fn with_initials(&self, initials: Vec<R::Elem>) -> Result<Self> {
        let mut r = self.clone();
        if initials.len() != r.order() {
            return Err(Error::InvalidRecurrence(format!(
                "order {} needs {} initial values, got {}",
                r.order(),
                r.order(),
                initials.len()
            )));
        }
        r.initials = initials;
        Ok(r)
    }

    pub fn coeff(&self, j: usize, n: usize) -> Result<R::Elem> {
        self.coeffs[j].eval(&self.ring, n)
    }

    /// x_{n+1} from the prefix xs (which must contain x_{n−k}..x_n).
    pub fn step(&self, xs: &[R::Elem], n: usize) -> Result<R::Elem> {
        let ring = &self.ring;
        let mut acc = self.forcing.eval(ring, n)?;
        for j in 0..self.order() {
            let a = self.coeff(j, n)?;
            acc = ring.add(&acc, &ring.mul(&a, &xs[n - j]));
        }
        Ok(acc)
    }

    /// x_{n+1} − Σ a_{j,n}x_{n−j} − b_n for n ≥ k.
    pub fn residual(&self, xs: &[R::Elem], n: usize) -> Result<R::Elem> {
        let predicted = self.step(xs, n)?;
        Ok(self.ring.sub(&xs[n + 1], &predicted))
    }

    pub fn to_json(&self) -> Value {
        let ring = &self.ring;
        json!({
            "ring": self.ring.descriptor(),
            "order": self.order(),
            "coeffs": self.coeffs.iter().map(|c| c.to_json(ring)).collect::<Vec<_>>(),
            "forcing": self.forcing.to_json(ring),
            "initials": self.initials.iter().map(|x| ring.to_json(x)).collect::<Vec<_>>(),
            "start_index": self.start_index,
        })
    }
}

/// The forward solution x_0, x_1, … of a recurrence, extended on demand.
#[derive(Clone, Debug)]
pub struct SolutionStream<R: Ring> {
    rec: Arc<LinearRecurrence<R>>,
    terms: Vec<R::Elem>,
}

impl<R: Ring> SolutionStream<R> {
    pub fn new(rec: Arc<LinearRecurrence<R>>) -> Self {
        let terms = rec.initials.clone();
        SolutionStream { rec, terms }
    }

    pub fn recurrence(&self) -> &Arc<LinearRecurrence<R>> {
        &self.rec
    }

    pub fn ring(&self) -> &R {
        &self.rec.ring
    }

    /// Ensure x_0..x_n are available.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.terms.len() <= n {
            let m = self.terms.len() - 1;
            let next = self.rec.step(&self.terms, m)?;
            self.terms.push(next);
        }
        Ok(())
    }

    pub fn term(&mut self, n: usize) -> Result<R::Elem> {
        self.extend_to(n)?;
        Ok(self.terms[n].clone())
    }

    /// The materialized prefix.
    pub fn terms(&self) -> &[R::Elem] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<R::Elem> {
        self.terms
    }
}

/// Direct forward iteration: x_0..x_{n_max}. This is the oracle every other
/// solution method is checked against.
pub fn iterate<R: Ring>(rec: &LinearRecurrence<R>, n_max: usize) -> Result<SolutionStream<R>> {
    let mut s = SolutionStream::new(Arc::new(rec.clone()));
    s.extend_to(n_max)?;
    s.terms.truncate(n_max + 1);
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UnitaryVerdict {
    Unitary,
    FailsAt { n: usize, class: ElementClass },
}

/// Check that x_0..x_{up_to} are all units.
pub fn is_unitary_solution<R: Ring>(rec: &LinearRecurrence<R>, up_to: usize) -> Result<UnitaryVerdict> {
    rec.ring.try_one()?;
    let s = iterate(rec, up_to)?;
    for (n, x) in s.terms().iter().enumerate() {
        let class = rec.ring.classify(x);
        if class != ElementClass::Unit {
            return Ok(UnitaryVerdict::FailsAt { n, class });
        }
    }
    Ok(UnitaryVerdict::Unitary)
}

/// Forward solution from strictly positive initial functions, certified positive
/// at every grid point. Requires nonnegative coefficient samples whose sum is
/// positive at each point for every n that is used.
pub fn positive_unitary_solution<R: Ring>(
    rec: &LinearRecurrence<R>,
    initials: Vec<R::Elem>,
    horizon: usize,
) -> Result<SolutionStream<R>> {
    let ring = &rec.ring;
    let samples = |x: &R::Elem| {
        ring.real_samples(x)
            .ok_or_else(|| Error::Type(format!("positivity needs a real or sampled ring, not {}", ring.descriptor())))
    };
    for (i, x) in initials.iter().enumerate() {
        if let Some(point) = samples(x)?.iter().position(|&v| v <= 0.0) {
            return Err(Error::HypothesisViolated {
                n: i,
                point: Some(point),
                message: format!("initial value x_{i} is not positive"),
            });
        }
    }
    let rec = rec.with_initials(initials)?;
    for n in rec.k()..horizon {
        let mut total: Option<Vec<f64>> = None;
        for j in 0..rec.order() {
            let a = samples(&rec.coeff(j, n)?)?;
            if let Some(point) = a.iter().position(|&v| v < 0.0) {
                return Err(Error::HypothesisViolated {
                    n,
                    point: Some(point),
                    message: format!("coefficient a_{j} is negative"),
                });
            }
            total = Some(match total {
                None => a,
                Some(t) => t.iter().zip(&a).map(|(x, y)| x + y).collect(),
            });
        }
        if let Some(point) = total.unwrap_or_default().iter().position(|&v| v <= 0.0) {
            return Err(Error::HypothesisViolated {
                n,
                point: Some(point),
                message: "coefficients sum to zero".into(),
            });
        }
    }
    let s = iterate(&rec, horizon)?;
    for (n, x) in s.terms().iter().enumerate() {
        if let Some(point) = samples(x)?.iter().position(|&v| v <= 0.0 || !v.is_finite()) {
            return Err(Error::HypothesisViolated {
                n,
                point: Some(point),
                message: format!("term x_{n} is not positive"),
            });
        }
    }
    Ok(s)
}
