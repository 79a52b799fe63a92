//! Built-in worked examples. Every value shown is computed; the output is
//! fixed by construction so it can serve as a golden file.

use serde_json::json;

use super::{factor_table, fmt_list, json_list, oracle_line, sequence_table, DemoName, Rendered, Table};
use crate::closed_form::{
    bessel_general_solution, bessel_recurrence, boolean_closed_form, chebyshev_t, formula_audit, solve_order2_ring,
    AuditCase,
};
use crate::coeff::CoefficientSequence;
use crate::eigen::{eigenseq_from_seed, Eigensequence};
use crate::error::{Error, Result};
use crate::factor::sc_factorize;
use crate::format::fmt_float;
use crate::nonrecursive::{cofactor_reconstruct, enumerate_nonrecursive, solved_form, split_nonrecursive};
use crate::periodic::{find_periodic_eigenseq, CandidateVerdict, PeriodicOutcome};
use crate::recurrence::{iterate, positive_unitary_solution, LinearRecurrence};
use crate::ring::{BooleanRing, DynRing, RealField, Ring, RingDescriptor, RingValue, SampledFunctions};

pub fn demo(name: DemoName) -> Result<Rendered> {
    match name {
        DemoName::Fibonacci => fibonacci(),
        DemoName::Chebyshev => chebyshev(),
        DemoName::Bessel => bessel(),
        DemoName::Z7Periodic => z7_periodic(),
        DemoName::Z8Nonrecursive => z8_nonrecursive(),
        DemoName::Boolean => boolean(),
    }
}

fn dyn_ring(desc: RingDescriptor) -> Result<DynRing> {
    DynRing::new(&desc)
}

fn ints(ring: &DynRing, xs: &[i64]) -> Vec<RingValue> {
    xs.iter().map(|&x| ring.from_i64(x)).collect()
}

fn fibonacci() -> Result<Rendered> {
    const H: usize = 12;
    let q = dyn_ring(RingDescriptor::Rational)?;
    let rec = LinearRecurrence::constant(q.clone(), ints(&q, &[1, 1]), ints(&q, &[0, 1]))?;
    let alpha = eigenseq_from_seed(&rec, vec![q.one()], H + 1)?;
    let f = sc_factorize(&rec, alpha)?;
    let sol = f.solve(H, true)?;
    let table = factor_table(&q, &f, &sol.x, &sol.t, H)?;
    let result = json!({
        "factorization": f.to_json(H)?,
        "x": json_list(&q, &sol.x),
        "t": json_list(&q, &sol.t),
        "verified": sol.verified,
    });
    Ok(Rendered::new("demo fibonacci", Some("Q".into()), result)
        .note("x(n+1) = x(n) + x(n-1), x0 = 0, x1 = 1")
        .note("alpha: eigensequence from r1 = 1, alpha(n) = F(n+1)/F(n)")
        .note("factor: t(n+1) = a'0(n)*t(n) with a'0(n) = -F(n)/F(n+1)")
        .note(oracle_line(sol.verified, H))
        .table(table))
}

fn chebyshev() -> Result<Rendered> {
    const H: usize = 6;
    let re = RealField::<f64>::default();
    let mut header = vec!["s".to_string()];
    header.extend((0..=H).map(|n| format!("T{n}")));
    header.push("max |T - closed form|".into());
    let mut table = Table { title: None, header, rows: Vec::new() };
    let mut data = Vec::new();
    for s in [-1.0, -0.5, 0.5, 1.0, 1.5, 2.0] {
        let rec = LinearRecurrence::constant(re, vec![2.0 * s, -1.0], vec![1.0, s])?;
        let xs = iterate(&rec, H)?.into_terms();
        let dev = xs.iter().enumerate().map(|(n, x)| (x - chebyshev_t(s, n)).abs()).fold(0.0, f64::max);
        let mut row = vec![fmt_float(s)];
        row.extend(xs.iter().map(|x| fmt_float(*x)));
        row.push(fmt_float(dev));
        table.push(row);
        data.push(json!({"s": s, "terms": xs, "max_deviation": dev}));
    }
    Ok(Rendered::new("demo chebyshev", Some("R".into()), json!(data))
        .note("T(n+1) = 2s*T(n) - T(n-1), T0 = 1, T1 = s, compared with the closed form")
        .table(table))
}

fn bessel() -> Result<Rendered> {
    const H: usize = 6;
    let grid = [0.5, 1.0, 2.0];
    let ring = SampledFunctions::<f64>::new(&grid, 1e-12)?;
    let one = ring.one();
    let rec = bessel_recurrence(&ring, one.clone(), one.clone())?;
    let u = positive_unitary_solution(&rec, vec![one.clone(), one.clone()], H + 2)?.into_terms();
    let mut header = vec!["n".to_string()];
    header.extend(grid.iter().map(|s| format!("u(s = {})", fmt_float(*s))));
    let mut table = Table { title: None, header, rows: Vec::new() };
    for (n, un) in u.iter().take(H + 1).enumerate() {
        let mut row = vec![n.to_string()];
        row.extend(un.iter().map(|v| fmt_float(*v)));
        table.push(row);
    }
    let u4 = formula_audit(AuditCase::BesselU4 { s: 2.0 }, 4)?;
    let row = &u4.rows[0];
    let x0 = ring.constant(1.0);
    let x1 = ring.constant(2.0);
    let direct = iterate(&rec.with_initials(vec![x0.clone(), x1.clone()])?, H)?.into_terms();
    let mut worst: f64 = 0.0;
    for (n, d) in direct.iter().enumerate() {
        let g = bessel_general_solution(&rec, &u, x0.clone(), x1.clone(), n)?;
        for (a, b) in g.iter().zip(d) {
            worst = worst.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
        }
    }
    let result = json!({
        "grid": grid,
        "u": u.iter().take(H + 1).collect::<Vec<_>>(),
        "u4_at_2": {"oracle": row.oracle, "corrected": row.corrected, "variant": row.variant},
        "general_solution_max_relative_deviation": worst,
    });
    Ok(Rendered::new("demo bessel", Some("Sampled(3 points)".into()), result)
        .note("x(n+1) = (2n/s)*x(n) + x(n-1) on the grid s = 0.5, 1, 2; u0 = u1 = 1")
        .note(format!(
            "u4(2) = {} (48/s^3 + 24/s^2 + 8/s + 1 gives {}; with 2/s it gives {})",
            fmt_float(row.oracle),
            fmt_float(row.corrected),
            fmt_float(row.variant)
        ))
        .note(format!(
            "general solution from x0 = 1, x1 = 2 via the ratios of u: max relative deviation {} for n <= {H}",
            fmt_float(worst)
        ))
        .table(table))
}

/// "t1", "4t1", "0".
fn multiple_of_t1(m: u64) -> String {
    match m {
        0 => "0".into(),
        1 => "t1".into(),
        m => format!("{m}t1"),
    }
}

fn z7_periodic() -> Result<Rendered> {
    let z7 = dyn_ring(RingDescriptor::Modular { m: 7 })?;
    let a0 = CoefficientSequence::periodic(ints(&z7, &[-1, -1, 2]), 1)?;
    // x1 = r1·x0 + t1 with x0 = 1 and t1 = 1, so t_n is the multiplier of t1.
    let rec = LinearRecurrence::new(
        z7.clone(),
        vec![a0, CoefficientSequence::Constant(z7.one())],
        CoefficientSequence::Constant(z7.zero()),
        ints(&z7, &[1, 4]),
    )?;
    let search = find_periodic_eigenseq(&rec)?;
    let PeriodicOutcome::InRing(cands) = &search.outcome else {
        return Err(Error::InvalidValue("expected roots in Z/7".into()));
    };
    let roots: Vec<RingValue> = cands.iter().map(|c| c.r1.clone()).collect();
    let cand = cands
        .iter()
        .find(|c| c.verdict == CandidateVerdict::Success)
        .ok_or_else(|| Error::InvalidValue("no period-3 eigensequence".into()))?;
    let alpha = cand.eigenseq.clone().expect("successful candidates carry the eigensequence");
    let f = sc_factorize(&rec, alpha)?;
    let sol = f.solve(9, true)?;
    let mult: Vec<u64> = sol
        .t
        .iter()
        .map(|t| z7.format(t).parse::<u64>().map_err(|_| Error::Type(format!("{t} is not a residue"))))
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["", "j = 0", "j = 1", "j = 2"]);
    for i in 1..=3 {
        let mut row = vec![format!("t(3j+{i})")];
        row.extend((0..3).map(|j| multiple_of_t1(mult[3 * j + i - 1])));
        table.push(row);
    }
    let p = search.table.p;
    let rho = cand.rho.as_ref().map(|r| z7.format(r)).unwrap_or_default();
    let result = json!({
        "quadratic": json_list(&z7, &search.quadratic),
        "roots": json_list(&z7, &roots),
        "r1": z7.to_json(&cand.r1),
        "eigensequence": json_list(&z7, &cand.terms[..p]),
        "rho": cand.rho.as_ref().map(|r| z7.to_json(r)),
        "t_multipliers": mult,
    });
    Ok(Rendered::new("demo z7-periodic", Some("Z/7".into()), result)
        .note("x(n+1) = a(n)*x(n) + x(n-1), a = (-1, -1, 2) repeating from n = 1")
        .note(format!("quadratic (r^2, r, 1): {}", fmt_list(&z7, &search.quadratic)))
        .note(format!("roots: {}", fmt_list(&z7, &roots)))
        .note(format!(
            "from r1 = {}: eigensequence {} (period {p}), rho = {rho}",
            z7.format(&cand.r1),
            fmt_list(&z7, &cand.terms[..p])
        ))
        .note(oracle_line(sol.verified, 9))
        .table(table))
}

/// The two branch choices tabulated for 4x(n+1) + 6x(n) + 2x(n-1) = 0 over Z/8.
const Z8_BRANCHES: [[i64; 15]; 2] = [
    [4, 4, 4, 4, 4, 0, 0, 0, 0, 0, 4, 4, 4, 4, 4],
    [4, 0, 4, 0, 0, 4, 0, 0, 0, 4, 0, 0, 0, 0, 4],
];

fn z8_nonrecursive() -> Result<Rendered> {
    const H: usize = 15;
    let z8 = dyn_ring(RingDescriptor::Modular { m: 8 })?;
    let [c, e, f] = [4, 6, 2].map(|v| z8.from_i64(v));
    let (x0, x1) = (z8.from_i64(1), z8.from_i64(3));
    let split = split_nonrecursive(&z8, &c, &e, &f)?;
    let t1 = z8.sub(&x1, &z8.mul(&split.beta, &x0));
    let sols = enumerate_nonrecursive(&z8, &c, &split.d, H, Some(&t1))?;
    let beta = Eigensequence::constant(z8.clone(), split.beta.clone());
    let mut out = Rendered::new("demo z8-nonrecursive", Some("Z/8".into()), serde_json::Value::Null)
        .note("4*x(n+1) + 6*x(n) + 2*x(n-1) = 0, x0 = 1, x1 = 3")
        .note(format!(
            "roots of 4b^2 + 6b + 2: {}; beta = {}, d = {}",
            fmt_list(&z8, &split.roots),
            z8.format(&split.beta),
            z8.format(&split.d)
        ))
        .note(format!(
            "factor 4*t(n+1) + {}*t(n) = 0, cofactor x(n+1) = {}*x(n) + t(n+1)",
            z8.format(&split.d),
            z8.format(&split.beta)
        ))
        .note(format!("viable t values: {}; t1 = {}", fmt_list(&z8, &sols.viable), z8.format(&t1)))
        .note(format!("solutions through n = {H}: {}", sols.sequences.len()));
    let mut shown = Vec::new();
    for (i, branch) in Z8_BRANCHES.iter().enumerate() {
        let t = ints(&z8, branch);
        if !sols.sequences.contains(&t) {
            return Err(Error::InvalidValue(format!("branch {} is not a solution of the factor equation", i + 1)));
        }
        let x = cofactor_reconstruct(&t, &beta, x0.clone(), H)?;
        for n in 1..H {
            let lhs = z8.add(&z8.add(&z8.mul(&c, &x[n + 1]), &z8.mul(&e, &x[n])), &z8.mul(&f, &x[n - 1]));
            if !z8.is_zero(&lhs) {
                return Err(Error::OracleMismatch { n: n + 1, expected: "0".into(), actual: z8.format(&lhs) });
            }
        }
        out = out.table(sequence_table(&z8, &[("t_n", &t), ("x_n", &x[1..])]).titled(format!("branch {}", i + 1)));
        shown.push(json!({"t": json_list(&z8, &t), "x": json_list(&z8, &x)}));
    }

    let z9 = dyn_ring(RingDescriptor::Modular { m: 9 })?;
    let [c9, e9, f9] = [4, 6, 2].map(|v| z9.from_i64(v));
    let split9 = split_nonrecursive(&z9, &c9, &e9, &f9)?;
    let (y0, y1) = (z9.from_i64(1), z9.from_i64(3));
    let t9 = z9.sub(&y1, &z9.mul(&split9.beta, &y0));
    let sols9 = enumerate_nonrecursive(&z9, &c9, &split9.d, H, Some(&t9))?;
    let inv = z9.inverse(&c9)?;
    let mult = sols9.multiplier.clone().ok_or_else(|| Error::InvalidValue("4 is a unit in Z/9".into()))?;
    let (a0, a1) = solved_form(&z9, &c9, &e9, &f9).expect("4 is a unit in Z/9");
    let only = sols9.sequences.first().cloned().unwrap_or_default();
    let beta9 = Eigensequence::constant(z9.clone(), split9.beta.clone());
    let y = cofactor_reconstruct(&only, &beta9, y0.clone(), H)?;
    let direct = iterate(&LinearRecurrence::constant(z9.clone(), vec![a0.clone(), a1.clone()], vec![y0, y1])?, H)?;
    if direct.terms() != &y[..] {
        return Err(Error::OracleMismatch { n: 0, expected: fmt_list(&z9, direct.terms()), actual: fmt_list(&z9, &y) });
    }
    let result = json!({
        "z8": {
            "beta": z8.to_json(&split.beta),
            "d": z8.to_json(&split.d),
            "viable": json_list(&z8, &sols.viable),
            "count": sols.sequences.len(),
            "branches": shown,
        },
        "z9": {
            "beta": z9.to_json(&split9.beta),
            "d": z9.to_json(&split9.d),
            "inverse_of_leading": z9.to_json(&inv),
            "multiplier": z9.to_json(&mult),
            "count": sols9.sequences.len(),
            "solved_form": [z9.to_json(&a0), z9.to_json(&a1)],
            "t": json_list(&z9, &only),
            "x": json_list(&z9, &y),
        },
    });
    out.report.result = result;
    Ok(out
        .note(format!(
            "over Z/9: 4 is a unit (inverse {}); beta = {}, d = {}; t(n+1) = -{}*{}*t(n) = {}*t(n)",
            z9.format(&inv),
            z9.format(&split9.beta),
            z9.format(&split9.d),
            z9.format(&split9.d),
            z9.format(&inv),
            z9.format(&mult)
        ))
        .note(format!(
            "solutions from t1 = {}: {}; solved form x(n+1) = {}*x(n) + {}*x(n-1)",
            z9.format(&t9),
            sols9.sequences.len(),
            z9.format(&a0),
            z9.format(&a1)
        ))
        .table(sequence_table(&z9, &[("t_n", &only), ("x_n", &y[1..])]).titled("Z/9")))
}

fn boolean() -> Result<Rendered> {
    const H: usize = 8;
    let bo = BooleanRing::new(4)?;
    let (a, b, x0, x1) = (bo.set(&[1, 2])?, bo.set(&[2, 3])?, bo.set(&[0, 2])?, bo.set(&[1, 3])?);
    let rec = LinearRecurrence::constant(bo, vec![bo.add(&a, &b), bo.neg(&bo.mul(&a, &b))], vec![x0, x1])?;
    let xs = iterate(&rec, H)?.into_terms();
    let mut table = Table::new(&["n", "iteration", "general form", "even/odd form"]);
    let mut agree = true;
    for (n, x) in xs.iter().enumerate() {
        let g = solve_order2_ring(&bo, &a, &b, &x0, &x1, n);
        let c = boolean_closed_form(&bo, &a, &b, &x0, &x1, n);
        agree &= g == *x && c == *x;
        table.push(vec![n.to_string(), bo.format(x), bo.format(&g), bo.format(&c)]);
    }
    let result = json!({
        "a": bo.to_json(&a),
        "b": bo.to_json(&b),
        "terms": json_list(&bo, &xs),
        "agree": agree,
    });
    Ok(Rendered::new("demo boolean", Some("Boolean(4)".into()), result)
        .note("x(n+1) = (a+b)*x(n) + ab*x(n-1) over subsets of {0,1,2,3}")
        .note(format!("a = {}, b = {}, x0 = {}, x1 = {}", bo.format(&a), bo.format(&b), bo.format(&x0), bo.format(&x1)))
        .note("even n >= 2: (a+b)x1 + ab*x0; odd n >= 3: (a+b)x1 + ab*x1")
        .note(format!("all three agree for n <= {H}: {}", if agree { "yes" } else { "no" }))
        .table(table))
}
