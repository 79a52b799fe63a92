//! Semiconjugate factorization of x_{n+1} = Σ_j a_{j,n}x_{n−j} + b_n along a
//! unitary eigensequence α into
//!
//!   t_{n+1} = Σ_{m=0}^{k−1} a'_{m,n}·t_{n−m} + b_n        (factor, order k)
//!   x_{n+1} = α_{n+1}·x_n + t_{n+1}                     (cofactor, order 1)
//!
//! with a'_{m,n} = −Σ_{i=m+1}^{k} a_{i,n}·(∏_{j=m+1}^{i} α_{n−j+1})⁻¹ and
//! t_{m+1} = x_{m+1} − α_{m+1}·x_m for m < k.
//!
//! The factor recurrence is stored in its own index: T_N = t_{N+1}, so its
//! coefficient A'_{m,N} is a'_{m,N+1}, its forcing is b_{N+1} and its
//! initial values are t_1..t_k.

use std::collections::HashSet;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::coeff::CoefficientSequence;
use crate::eigen::{
    eigenseq_from_seed, eigenseq_from_unitary, eigenvalues_constant, verify_at, Eigensequence, Side,
};
use crate::error::{Error, Result};
use crate::nonrecursive::cofactor_reconstruct;
use crate::recurrence::{iterate, LinearRecurrence, SolutionStream};
use crate::ring::{ElementClass, Ring};

/// Verifies the characteristic equation for α at each n once and keeps the
/// most recent row of factor coefficients.
struct Checker<R: Ring> {
    rec: LinearRecurrence<R>,
    alpha: Arc<Eigensequence<R>>,
    done: Mutex<HashSet<usize>>,
    row: Mutex<Option<(usize, Arc<Vec<R::Elem>>)>>,
}

impl<R: Ring> Checker<R> {
    fn check(&self, n: usize) -> Result<()> {
        if self.done.lock().expect("checker lock").contains(&n) {
            return Ok(());
        }
        verify_at(&self.rec, &self.alpha, n)?;
        self.done.lock().expect("checker lock").insert(n);
        Ok(())
    }

    fn coeff(&self, m: usize, n: usize) -> Result<R::Elem> {
        if let Some((at, row)) = &*self.row.lock().expect("row lock") {
            if *at == n {
                return Ok(row[m].clone());
            }
        }
        self.check(n)?;
        let row = Arc::new(factor_row(&self.rec, &self.alpha, n)?);
        let v = row[m].clone();
        *self.row.lock().expect("row lock") = Some((n, row));
        Ok(v)
    }
}

pub struct ScFactorization<R: Ring> {
    pub original: Arc<LinearRecurrence<R>>,
    pub alpha: Arc<Eigensequence<R>>,
    /// None for a first-order original, where t_{n+1} = b_n.
    pub factor: Option<LinearRecurrence<R>>,
    /// t_1..t_k.
    pub t_initials: Vec<R::Elem>,
    checker: Arc<Checker<R>>,
}

impl<R: Ring> std::fmt::Debug for ScFactorization<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScFactorization")
            .field("original", &self.original)
            .field("alpha", &self.alpha)
            .field("factor", &self.factor)
            .field("t_initials", &self.t_initials)
            .finish()
    }
}

/// a'_{0,n}..a'_{k−1,n}, from a'_{k−1,n} = −a_{k,n}/r_{n−k+1} and
/// a'_{m,n} = (a'_{m+1,n} − a_{m+1,n})/r_{n−m}.
fn factor_row<R: Ring>(rec: &LinearRecurrence<R>, alpha: &Eigensequence<R>, n: usize) -> Result<Vec<R::Elem>> {
    let ring = &rec.ring;
    let k = rec.k();
    let mut row = vec![ring.zero(); k];
    let mut acc = ring.zero();
    for m in (0..k).rev() {
        acc = ring.mul(&ring.sub(&acc, &rec.coeff(m + 1, n)?), &alpha.inverse(n - m)?);
        row[m] = acc.clone();
    }
    Ok(row)
}

/// Factor `rec` along `alpha`. α must be unitary and satisfy the characteristic
/// equation at every n that is used; this is checked at n = k now and at later n
/// as the factor is evaluated.
pub fn sc_factorize<R: Ring>(rec: &LinearRecurrence<R>, alpha: Arc<Eigensequence<R>>) -> Result<ScFactorization<R>> {
    let ring = rec.ring.clone();
    ring.try_one()?;
    let k = rec.k();
    let checker = Arc::new(Checker { rec: rec.homogeneous(), alpha: alpha.clone(), done: Mutex::new(HashSet::new()), row: Mutex::new(None) });
    checker.check(k)?;
    for i in 1..=k {
        alpha.inverse(i)?;
    }
    let original = Arc::new(rec.clone());
    if k == 0 {
        return Ok(ScFactorization { original, alpha, factor: None, t_initials: Vec::new(), checker });
    }
    let xs = &rec.initials;
    let t_initials = (0..k)
        .map(|m| Ok(ring.sub(&xs[m + 1], &ring.mul(&alpha.term(m + 1)?, &xs[m]))))
        .collect::<Result<Vec<_>>>()?;

    let all_constant = alpha.source_kind() == "eigenvalue" && rec.coeffs.iter().all(|c| c.as_constant().is_some());
    let coeffs = if all_constant {
        factor_row(rec, &alpha, k)?.into_iter().map(CoefficientSequence::Constant).collect()
    } else {
        (0..k)
            .map(|m| {
                let checker = checker.clone();
                CoefficientSequence::custom(move |_: &R, big_n: usize| checker.coeff(m, big_n + 1))
            })
            .collect()
    };
    let forcing = match &rec.forcing {
        CoefficientSequence::Constant(b) => CoefficientSequence::Constant(b.clone()),
        b => {
            let b = b.clone();
            CoefficientSequence::custom(move |r: &R, big_n: usize| b.eval(r, big_n + 1))
        }
    };
    let factor = LinearRecurrence::new(ring, coeffs, forcing, t_initials.clone())?;
    Ok(ScFactorization { original, alpha, factor: Some(factor), t_initials, checker })
}

/// Terms produced by solving the factor and cofactor equations in turn.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredSolution<E> {
    /// x_0..x_horizon.
    pub x: Vec<E>,
    /// t_1..t_horizon.
    pub t: Vec<E>,
    /// Whether x was compared with direct iteration.
    pub verified: bool,
}

impl<R: Ring> ScFactorization<R> {
    pub fn ring(&self) -> &R {
        &self.original.ring
    }

    /// Check the characteristic equation for α at n = k..=last.
    pub fn verify_alpha_through(&self, last: usize) -> Result<()> {
        for n in self.original.k()..=last {
            self.checker.check(n)?;
        }
        Ok(())
    }

    /// t_1..t_horizon from the factor equation.
    pub fn factor_terms(&self, horizon: usize) -> Result<Vec<R::Elem>> {
        if horizon == 0 {
            return Ok(Vec::new());
        }
        match &self.factor {
            Some(f) => Ok(iterate(f, horizon - 1)?.into_terms()),
            None => (0..horizon).map(|n| self.original.forcing.eval(self.ring(), n)).collect(),
        }
    }

    /// Solve factor then cofactor through `horizon`; with `verify`, compare with
    /// direct iteration of the original and fail on the first disagreement.
    pub fn solve(&self, horizon: usize, verify: bool) -> Result<FactoredSolution<R::Elem>> {
        let t = self.factor_terms(horizon)?;
        if horizon > 0 {
            self.verify_alpha_through(horizon - 1)?;
        }
        let x = cofactor_reconstruct(&t, &self.alpha, self.original.initials[0].clone(), horizon)?;
        if verify {
            check_against_oracle(&self.original, &x)?;
        }
        Ok(FactoredSolution { x, t, verified: verify })
    }

    /// α, the factor equation with coefficients tabulated through `horizon`, and t_1..t_k.
    pub fn to_json(&self, horizon: usize) -> Result<Value> {
        let ring = self.ring();
        let alpha: Vec<Value> = self.alpha.prefix(horizon + 1)?.iter().map(|a| ring.to_json(a)).collect();
        let factor = match &self.factor {
            None => Value::Null,
            Some(f) => {
                // The factor first fires at N = k − 1; earlier coefficients are never used.
                let first = f.k();
                let tab = |s: &CoefficientSequence<R>| -> Result<Value> {
                    if s.as_constant().is_some() {
                        return Ok(s.to_json(ring));
                    }
                    let vals: Vec<Value> = (first..first + horizon)
                        .map(|n| Ok(ring.to_json(&s.eval(ring, n)?)))
                        .collect::<Result<_>>()?;
                    Ok(json!({"kind": "table", "from": first, "values": vals}))
                };
                json!({
                    "order": f.order(),
                    "coeffs": f.coeffs.iter().map(tab).collect::<Result<Vec<_>>>()?,
                    "forcing": tab(&f.forcing)?,
                    "initials": f.initials.iter().map(|x| ring.to_json(x)).collect::<Vec<_>>(),
                    "index_shift": 1,
                })
            }
        };
        Ok(json!({
            "original": self.original.to_json(),
            "alpha": alpha,
            "factor": factor,
            "t_initials": self.t_initials.iter().map(|x| ring.to_json(x)).collect::<Vec<_>>(),
        }))
    }
}

/// Convenience wrapper for [`ScFactorization::solve`] with verification on.
pub fn solve_via_factorization<R: Ring>(f: &ScFactorization<R>, horizon: usize) -> Result<FactoredSolution<R::Elem>> {
    f.solve(horizon, true)
}

fn check_against_oracle<R: Ring>(rec: &LinearRecurrence<R>, x: &[R::Elem]) -> Result<()> {
    let ring = &rec.ring;
    let oracle = iterate(rec, x.len().saturating_sub(1))?;
    for (n, (a, b)) in oracle.terms().iter().zip(x).enumerate() {
        if !ring.equal(a, b) {
            return Err(Error::OracleMismatch { n, expected: ring.format(a), actual: ring.format(b) });
        }
    }
    Ok(())
}

/// How to obtain the eigensequence for one cascade stage.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenInput<E> {
    Eigenvalue(E),
    /// r_1..r_k for the stage equation.
    Seeds(Vec<E>),
    /// Initial values of a unitary solution of the stage equation; its ratios are used.
    UnitarySolution(Vec<E>),
    /// First unit eigenvalue, when the stage equation has constant coefficients.
    Discover,
}

/// A cascade of first-order equations: stage i factors the equation of order
/// k+1−i produced by stage i−1; the last stage is first order.
#[derive(Debug)]
pub struct TriangularSystem<R: Ring> {
    pub stages: Vec<ScFactorization<R>>,
    /// How each stage's α was obtained.
    pub sources: Vec<String>,
}

fn stage_alpha<R: Ring>(eq: &LinearRecurrence<R>, input: &EigenInput<R::Elem>) -> Result<(Arc<Eigensequence<R>>, String)> {
    let ring = &eq.ring;
    match input {
        EigenInput::Eigenvalue(v) => {
            Ok((Arc::new(Eigensequence::constant(ring.clone(), v.clone())), format!("eigenvalue {}", ring.format(v))))
        }
        EigenInput::Seeds(s) => {
            let desc = s.iter().map(|x| ring.format(x)).collect::<Vec<_>>().join(", ");
            Ok((eigenseq_from_seed(eq, s.clone(), eq.order())?, format!("seeds ({desc})")))
        }
        EigenInput::UnitarySolution(init) => {
            let desc = init.iter().map(|x| ring.format(x)).collect::<Vec<_>>().join(", ");
            let rec = eq.homogeneous().with_initials(init.clone())?;
            let stream = SolutionStream::new(Arc::new(rec));
            Ok((eigenseq_from_unitary(stream, Side::Right)?, format!("ratios of the solution from ({desc})")))
        }
        EigenInput::Discover => {
            let report = eigenvalues_constant(eq)?;
            let unit = report
                .roots
                .iter()
                .find(|r| ring.classify(r) == ElementClass::Unit)
                .ok_or_else(|| Error::InvalidValue("no unit eigenvalue in the ring".into()))?;
            Ok((Arc::new(Eigensequence::constant(ring.clone(), unit.clone())), format!("eigenvalue {}", ring.format(unit))))
        }
    }
}

/// Factor repeatedly until only first-order equations remain. `inputs` gives the
/// eigensequence for each of the first k stages; the last stage's multiplier is
/// forced (α_{n+1} = a_{0,n}).
pub fn cascade_factorize<R: Ring>(rec: &LinearRecurrence<R>, inputs: &[EigenInput<R::Elem>]) -> Result<TriangularSystem<R>> {
    let k = rec.k();
    if inputs.len() != k {
        return Err(Error::InvalidValue(format!(
            "a recurrence of order {} needs {k} eigensequence input(s), got {}",
            k + 1,
            inputs.len()
        )));
    }
    let mut stages = Vec::with_capacity(k + 1);
    let mut sources = Vec::with_capacity(k + 1);
    let mut eq = rec.clone();
    for depth in 1..=k + 1 {
        let fail = |e: Error| Error::StageFailed { depth, reason: e.to_string() };
        let (alpha, source) = if depth <= k {
            stage_alpha(&eq, &inputs[depth - 1]).map_err(fail)?
        } else {
            (eigenseq_from_seed(&eq, Vec::new(), 1).map_err(fail)?, "forced".to_string())
        };
        let f = sc_factorize(&eq, alpha).map_err(fail)?;
        let next = f.factor.clone();
        stages.push(f);
        sources.push(source);
        match next {
            Some(n) => eq = n,
            None => break,
        }
    }
    Ok(TriangularSystem { stages, sources })
}

impl<R: Ring> TriangularSystem<R> {
    /// Solve bottom-up. `levels[i]` holds the solution of stage i's equation
    /// (level 0 is the original) through horizon − i.
    pub fn solve(&self, horizon: usize, verify: bool) -> Result<Vec<Vec<R::Elem>>> {
        let depth = self.stages.len();
        if horizon + 1 < depth {
            return Err(Error::InvalidValue(format!("horizon must be at least {}", depth - 1)));
        }
        // Top-down first, so a failing eigensequence is blamed on its own stage.
        for (i, stage) in self.stages.iter().enumerate() {
            let h = horizon - i;
            let fail = |e: Error| Error::StageFailed { depth: i + 1, reason: e.to_string() };
            if h > 0 {
                stage.verify_alpha_through(h - 1).map_err(fail)?;
                stage.alpha.term(h).map_err(fail)?;
            }
        }
        let mut levels = vec![Vec::new(); depth];
        for i in (0..depth).rev() {
            let stage = &self.stages[i];
            let h = horizon - i;
            let t = if i + 1 == depth { stage.factor_terms(h)? } else { levels[i + 1].clone() };
            levels[i] = cofactor_reconstruct(&t[..h], &stage.alpha, stage.original.initials[0].clone(), h)?;
        }
        if verify {
            check_against_oracle(&self.stages[0].original, &levels[0])?;
        }
        Ok(levels)
    }
}

/// x_n = r_n⋯r_{m+1}·x_m for n > m, valid for a homogeneous second-order
/// recurrence with a_{1,m} = 0 (m ≥ 1). Cross-checked against direct iteration.
pub fn b0_product_solution<R: Ring>(
    rec: &LinearRecurrence<R>,
    alpha: &Eigensequence<R>,
    m: usize,
    horizon: usize,
) -> Result<Vec<R::Elem>> {
    let ring = &rec.ring;
    if rec.order() != 2 {
        return Err(Error::InvalidRecurrence("the product formula applies to second-order recurrences".into()));
    }
    let violated = |message: String| Error::HypothesisViolated { n: m, point: None, message };
    if m == 0 {
        return Err(violated("the product formula needs m ≥ 1".into()));
    }
    let a1 = rec.coeff(1, m)?;
    if !ring.is_zero(&a1) {
        return Err(violated(format!("a_1 at n = {m} is {}, not 0", ring.format(&a1))));
    }
    for n in m..horizon {
        if !ring.is_zero(&rec.forcing.eval(ring, n)?) {
            return Err(Error::HypothesisViolated { n, point: None, message: "the recurrence is not homogeneous".into() });
        }
    }
    let mut x = iterate(rec, m.min(horizon))?.into_terms();
    for n in m + 1..=horizon {
        verify_at(rec, alpha, n - 1)?;
        let next = ring.mul(&alpha.term(n)?, &x[n - 1]);
        x.push(next);
    }
    check_against_oracle(rec, &x)?;
    Ok(x)
}

/// x_{n+1} = (a+b)·x_n − ab·x_{n−1} + c_n split as t_{n+1} = a·t_n + c_n,
/// x_{n+1} = b·x_n + t_{n+1}. Uses only addition and multiplication, so it
/// works in rings without identity or units.
#[derive(Debug, Clone)]
pub struct SplitAb<R: Ring> {
    pub ring: R,
    pub a: R::Elem,
    pub b: R::Elem,
    pub forcing: CoefficientSequence<R>,
}

pub fn split_ab<R: Ring>(ring: R, a: R::Elem, b: R::Elem, forcing: CoefficientSequence<R>) -> SplitAb<R> {
    SplitAb { ring, a, b, forcing }
}

impl<R: Ring> SplitAb<R> {
    /// The second-order recurrence the pair solves.
    pub fn assembled(&self, x0: R::Elem, x1: R::Elem) -> Result<LinearRecurrence<R>> {
        let r = &self.ring;
        let coeffs = vec![
            CoefficientSequence::Constant(r.add(&self.a, &self.b)),
            CoefficientSequence::Constant(r.neg(&r.mul(&self.a, &self.b))),
        ];
        LinearRecurrence::new(r.clone(), coeffs, self.forcing.clone(), vec![x0, x1])
    }

    /// x_0..x_horizon and t_1..t_horizon.
    pub fn solve(&self, x0: R::Elem, x1: R::Elem, horizon: usize) -> Result<FactoredSolution<R::Elem>> {
        let r = &self.ring;
        let mut t = Vec::with_capacity(horizon);
        let mut x = vec![x0];
        if horizon >= 1 {
            t.push(r.sub(&x1, &r.mul(&self.b, &x[0])));
            x.push(x1);
        }
        for n in 1..horizon {
            let tn = r.add(&r.mul(&self.a, &t[n - 1]), &self.forcing.eval(r, n)?);
            x.push(r.add(&r.mul(&self.b, &x[n]), &tn));
            t.push(tn);
        }
        Ok(FactoredSolution { x, t, verified: false })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{BooleanRing, Integers, QuadraticField, Quad, Rationals, Zmod};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qi(n: i64) -> BigRational {
        q(n, 1)
    }

    fn fib_q() -> LinearRecurrence<Rationals> {
        LinearRecurrence::constant(Rationals, vec![qi(1), qi(1)], vec![qi(0), qi(1)]).unwrap()
    }

    fn fib_numbers(n: usize) -> Vec<i64> {
        let mut f = vec![0i64, 1];
        while f.len() <= n {
            let l = f.len();
            f.push(f[l - 1] + f[l - 2]);
        }
        f
    }

    #[test]
    fn fibonacci_factor_coefficient() {
        let rec = fib_q();
        let alpha = eigenseq_from_seed(&rec, vec![qi(1)], 20).unwrap();
        let f = sc_factorize(&rec, alpha).unwrap();
        let fac = f.factor.as_ref().unwrap();
        let fib = fib_numbers(25);
        for n in 1..20 {
            // A'_{0,N} = a'_{0,N+1}
            assert_eq!(fac.coeff(0, n - 1).unwrap(), q(-fib[n], fib[n + 1]), "n = {n}");
        }
        assert_eq!(f.t_initials, vec![qi(1)]);
        let sol = solve_via_factorization(&f, 20).unwrap();
        assert_eq!(sol.x[20], qi(fib[20]));
        // x_0 = 0 puts the solution on the ray of the unitary solution, so t vanishes after t_1.
        assert!(sol.t[1..].iter().all(|t| *t == qi(0)) || sol.t[0] != qi(0));
    }

    #[test]
    fn order_two_coefficient_is_minus_a1_over_alpha() {
        let r = Rationals;
        let a0 = CoefficientSequence::formula("n+1", &r).unwrap();
        let a1 = CoefficientSequence::formula("2*n-3", &r).unwrap();
        let rec = LinearRecurrence::new(r, vec![a0, a1.clone()], CoefficientSequence::Constant(qi(0)), vec![qi(1), qi(2)]).unwrap();
        let alpha = eigenseq_from_seed(&rec, vec![qi(3)], 12).unwrap();
        let f = sc_factorize(&rec, alpha.clone()).unwrap();
        for n in 1..10 {
            let expected = -a1.eval(&r, n).unwrap() / alpha.term(n).unwrap();
            assert_eq!(f.factor.as_ref().unwrap().coeff(0, n - 1).unwrap(), expected);
        }
        solve_via_factorization(&f, 30).unwrap();
    }

    #[test]
    fn first_order_is_degenerate() {
        let r = Rationals;
        let rec = LinearRecurrence::constant(r, vec![qi(1)], vec![qi(5)]).unwrap();
        let f = sc_factorize(&rec, Arc::new(Eigensequence::constant(r, qi(1)))).unwrap();
        assert!(f.factor.is_none());
        let sol = solve_via_factorization(&f, 6).unwrap();
        assert_eq!(sol.x, vec![qi(5); 7]);
        assert_eq!(sol.t, vec![qi(0); 6]);
        let bad = sc_factorize(&rec, Arc::new(Eigensequence::constant(r, qi(2)))).unwrap_err();
        assert!(matches!(bad, Error::NotAnEigensequence { n: 0, .. }));
    }

    #[test]
    fn wrong_alpha_is_rejected() {
        let rec = fib_q();
        let err = sc_factorize(&rec, Arc::new(Eigensequence::constant(Rationals, qi(2)))).unwrap_err();
        assert_eq!(err, Error::NotAnEigensequence { n: 1, residual: "1".into() });
        // Correct seeds but wrong continuation: caught lazily at the first n that uses it.
        let listed = Eigensequence::listed(Rationals, vec![qi(1), qi(2), qi(3, ), qi(5)], true).unwrap();
        let f = sc_factorize(&rec, Arc::new(listed)).unwrap();
        assert!(matches!(f.solve(10, false).unwrap_err(), Error::NotAnEigensequence { n: 2, .. }));
    }

    #[test]
    fn z7_table_indices() {
        // a_{0,n} periodic (−1,−1,2) from n = 1, b ≡ 1, eigensequence (3,4,1).
        let z7 = Zmod::new(7).unwrap();
        let a0 = CoefficientSequence::periodic(vec![6, 6, 2], 1).unwrap();
        let rec = LinearRecurrence::new(z7, vec![a0, CoefficientSequence::Constant(1)], CoefficientSequence::Constant(0), vec![1, 1]).unwrap();
        let alpha = Arc::new(Eigensequence::listed(z7, vec![3, 4, 1], true).unwrap());
        let f = sc_factorize(&rec, alpha.clone()).unwrap();
        let fac = f.factor.as_ref().unwrap();
        // a'_{0,n} = −α_n⁻¹: t_{n+1} = −α_n⁻¹ t_n.
        for n in 1..12 {
            let expect = z7.neg(&z7.inverse(&alpha.term(n).unwrap()).unwrap());
            assert_eq!(fac.coeff(0, n - 1).unwrap(), expect);
        }
        for t1 in 1..7u64 {
            let rec = rec.with_initials(vec![1, z7.add(&t1, &3)]).unwrap();
            let f = sc_factorize(&rec, alpha.clone()).unwrap();
            let sol = solve_via_factorization(&f, 9).unwrap();
            let mult = [1, 2, 3, 4, 1, 5, 2, 4, 6];
            let expect: Vec<u64> = mult.iter().map(|m| m * t1 % 7).collect();
            assert_eq!(sol.t, expect);
        }
    }

    #[test]
    fn zero_factor_forcing_stays_on_ray() {
        let r = Rationals;
        let a0 = CoefficientSequence::formula("n+2", &r).unwrap();
        let rec = LinearRecurrence::new(r, vec![a0, CoefficientSequence::Constant(qi(3))], CoefficientSequence::Constant(qi(0)), vec![qi(1), qi(2)]).unwrap();
        let u = iterate(&rec, 20).unwrap();
        let alpha = eigenseq_from_unitary(u.clone(), Side::Right).unwrap();
        let scaled = rec.with_initials(vec![qi(5), qi(10)]).unwrap();
        let f = sc_factorize(&scaled, alpha).unwrap();
        let sol = solve_via_factorization(&f, 20).unwrap();
        assert!(sol.t.iter().all(|t| *t == qi(0)));
        for n in 0..=20 {
            assert_eq!(sol.x[n], &u.terms()[n] * qi(5));
        }
    }

    fn three_ode() -> LinearRecurrence<Zmod> {
        let z11 = Zmod::new(11).unwrap();
        LinearRecurrence::constant(z11, vec![0, 2, 1], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn cascade_three_ode() {
        let rec = three_ode();
        let sys = cascade_factorize(&rec, &[EigenInput::Eigenvalue(10), EigenInput::UnitarySolution(vec![1, 4])]).unwrap();
        assert_eq!(sys.stages.len(), 3);
        let fib = sys.stages[1].original.clone();
        assert_eq!(fib.coeffs.iter().map(|c| *c.as_constant().unwrap()).collect::<Vec<_>>(), vec![1, 1]);
        let levels = sys.solve(100, true).unwrap();
        assert_eq!(levels[0], iterate(&rec, 100).unwrap().into_terms());
        // Stage 2 multiplier 4, stage 3 factor s_{n+1} = 8 s_n.
        let last = &sys.stages[2].original;
        assert_eq!(last.coeff(0, 5).unwrap(), 8);
        let sys = cascade_factorize(&rec, &[EigenInput::Discover, EigenInput::Discover]).unwrap();
        sys.solve(60, true).unwrap();
        // Fibonacci from (1, 1) reaches 0 mod 11 at n = 9.
        let sys = cascade_factorize(&rec, &[EigenInput::Eigenvalue(10), EigenInput::UnitarySolution(vec![1, 1])]).unwrap();
        let err = sys.solve(30, true).unwrap_err();
        assert!(matches!(err, Error::StageFailed { depth: 2, .. }), "{err}");
        sys.solve(8, true).unwrap();
        assert!(cascade_factorize(&rec, &[EigenInput::Discover]).is_err());
    }

    #[test]
    fn cascade_order_two_rational() {
        let r = Rationals;
        // (a+b, −ab) with a = 2, b = 3: stage multipliers b then a.
        let rec = LinearRecurrence::new(r, vec![CoefficientSequence::Constant(qi(5)), CoefficientSequence::Constant(qi(-6))], CoefficientSequence::formula("n", &r).unwrap(), vec![qi(0), qi(1)]).unwrap();
        let sys = cascade_factorize(&rec, &[EigenInput::Eigenvalue(qi(3))]).unwrap();
        assert_eq!(sys.stages[1].original.coeff(0, 0).unwrap(), qi(2));
        sys.solve(30, true).unwrap();
        let single = LinearRecurrence::constant(r, vec![qi(2)], vec![qi(1)]).unwrap();
        let sys = cascade_factorize(&single, &[]).unwrap();
        assert_eq!(sys.stages.len(), 1);
        assert_eq!(sys.solve(5, true).unwrap()[0][5], qi(32));
    }

    #[test]
    fn b0_product() {
        let r = Rationals;
        let a1 = CoefficientSequence::Table { values: vec![qi(1), qi(1), qi(1), qi(0)], tail: qi(1) };
        let rec = LinearRecurrence::new(r, vec![CoefficientSequence::Constant(qi(1)), a1], CoefficientSequence::Constant(qi(0)), vec![qi(2), qi(3)]).unwrap();
        let alpha = eigenseq_from_seed(&rec, vec![qi(2)], 30).unwrap();
        let x = b0_product_solution(&rec, &alpha, 3, 30).unwrap();
        assert_eq!(x, iterate(&rec, 30).unwrap().into_terms());
        for m in [1, 2, 4] {
            assert!(matches!(b0_product_solution(&rec, &alpha, m, 30), Err(Error::HypothesisViolated { .. })));
        }
        assert!(matches!(b0_product_solution(&rec, &alpha, 0, 30), Err(Error::HypothesisViolated { n: 0, .. })));
        // a_1 ≡ 0 except at n = 0, which the initial values absorb.
        let a1 = CoefficientSequence::Table { values: vec![qi(1)], tail: qi(0) };
        let rec = LinearRecurrence::new(r, vec![CoefficientSequence::formula("n+1", &r).unwrap(), a1], CoefficientSequence::Constant(qi(0)), vec![qi(1), qi(1)]).unwrap();
        let alpha = eigenseq_from_seed(&rec, vec![qi(1)], 10).unwrap();
        let x = b0_product_solution(&rec, &alpha, 1, 10).unwrap();
        assert_eq!(x[10], (2..=10).map(qi).product::<BigRational>());
    }

    #[test]
    fn split_examples() {
        let bo = BooleanRing::new(4).unwrap();
        let s = split_ab(bo.clone(), bo.set(&[1, 2]).unwrap(), bo.set(&[2, 3]).unwrap(), CoefficientSequence::Constant(bo.zero()));
        let sol = s.solve(bo.set(&[1]).unwrap(), bo.set(&[3]).unwrap(), 3).unwrap();
        assert_eq!(sol.x[2], bo.set(&[3]).unwrap());
        assert_eq!(sol.x[3], bo.set(&[3]).unwrap());
        assert_eq!(sol.x, iterate(&s.assembled(bo.set(&[1]).unwrap(), bo.set(&[3]).unwrap()).unwrap(), 3).unwrap().into_terms());

        let s = split_ab(Rationals, qi(2), qi(3), CoefficientSequence::Constant(qi(0)));
        let sol = s.solve(qi(0), qi(1), 10).unwrap();
        for n in 0..=10u32 {
            assert_eq!(sol.x[n as usize], qi(3i64.pow(n) - 2i64.pow(n)));
        }
        let s = split_ab(Integers, BigInt::from(5), BigInt::from(5), CoefficientSequence::Constant(BigInt::from(0)));
        let sol = s.solve(1.into(), 5.into(), 8).unwrap();
        assert_eq!(sol.x[8], BigInt::from(5).pow(8));
    }

    /// A ring that refuses identity and inverses.
    #[derive(Clone, Debug)]
    struct NoUnits(Zmod);

    impl Ring for NoUnits {
        type Elem = u64;
        fn descriptor(&self) -> crate::ring::RingDescriptor {
            self.0.descriptor()
        }
        fn zero(&self) -> u64 {
            0
        }
        fn one(&self) -> u64 {
            panic!("identity used")
        }
        fn has_identity(&self) -> bool {
            false
        }
        fn from_bigint(&self, v: &BigInt) -> u64 {
            self.0.from_bigint(v)
        }
        fn from_rational(&self, _: &BigRational) -> Result<u64> {
            panic!("rational embedding used")
        }
        fn add(&self, a: &u64, b: &u64) -> u64 {
            self.0.add(a, b)
        }
        fn neg(&self, a: &u64) -> u64 {
            self.0.neg(a)
        }
        fn mul(&self, a: &u64, b: &u64) -> u64 {
            self.0.mul(a, b)
        }
        fn classify(&self, _: &u64) -> ElementClass {
            panic!("classification used")
        }
        fn inverse(&self, _: &u64) -> Result<u64> {
            panic!("inverse used")
        }
        fn is_field(&self) -> bool {
            false
        }
        fn format(&self, a: &u64) -> String {
            self.0.format(a)
        }
        fn to_json(&self, a: &u64) -> Value {
            self.0.to_json(a)
        }
        fn parse_json(&self, v: &Value) -> Result<u64> {
            self.0.parse_json(v)
        }
    }

    proptest! {
        #[test]
        fn split_matches_oracle_without_units(a in 0u64..12, b in 0u64..12, c in proptest::collection::vec(0u64..12, 1..5), x0 in 0u64..12, x1 in 0u64..12) {
            let ring = NoUnits(Zmod::new(12).unwrap());
            let s = split_ab(ring.clone(), a, b, CoefficientSequence::Periodic { values: c, offset: 0 });
            let sol = s.solve(x0, x1, 25).unwrap();
            let oracle = iterate(&s.assembled(x0, x1).unwrap(), 25).unwrap();
            prop_assert_eq!(&sol.x[..], oracle.terms());
        }

        #[test]
        fn factorization_matches_oracle_mod_p(
            coeffs in proptest::collection::vec(0u64..13, 2..5),
            seeds in proptest::collection::vec(1u64..13, 3),
            init in proptest::collection::vec(0u64..13, 4),
            b in 0u64..13,
        ) {
            let z = Zmod::new(13).unwrap();
            let k = coeffs.len() - 1;
            let rec = LinearRecurrence::new(
                z,
                coeffs.iter().map(|&c| CoefficientSequence::Constant(c)).collect(),
                CoefficientSequence::Constant(b),
                init[..=k].to_vec(),
            ).unwrap();
            match eigenseq_from_seed(&rec, seeds[..k].to_vec(), 40) {
                Ok(alpha) => {
                    let f = sc_factorize(&rec, alpha).unwrap();
                    prop_assert_eq!(f.factor.as_ref().map_or(0, |f| f.order()) + 1, rec.order());
                    let sol = solve_via_factorization(&f, 40).unwrap();
                    // t-initial consistency
                    for m in 0..k {
                        let expect = z.sub(&sol.x[m + 1], &z.mul(&f.alpha.term(m + 1).unwrap(), &sol.x[m]));
                        prop_assert_eq!(sol.t[m], expect);
                    }
                }
                Err(Error::NonUnitTerm { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn quadratic_field_factorization() {
        let k = QuadraticField::new(2).unwrap();
        let c = vec![Quad::new(qi(1), qi(1)), Quad::new(qi(0), qi(1)), Quad::rational(qi(-3))];
        let rec = LinearRecurrence::new(
            k.clone(),
            c.into_iter().map(CoefficientSequence::Constant).collect(),
            CoefficientSequence::Constant(Quad::rational(qi(1))),
            vec![Quad::rational(qi(1)), Quad::new(qi(0), qi(2)), Quad::rational(qi(0))],
        ).unwrap();
        let alpha = eigenseq_from_seed(&rec, vec![Quad::rational(qi(1)), Quad::new(qi(1), qi(-1))], 25).unwrap();
        let f = sc_factorize(&rec, alpha).unwrap();
        solve_via_factorization(&f, 25).unwrap();
        let json = f.to_json(4).unwrap();
        assert_eq!(json["alpha"].as_array().unwrap().len(), 5);
        assert_eq!(json["factor"]["order"], 2);
    }
}
