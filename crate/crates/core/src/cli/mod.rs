//! The `scfact` command line: problem files in, tables or JSON out.
//!
//! Exit codes: 0 success, 2 invalid input, 3 the computation itself failed
//! (a non-unit term, a failed hypothesis, an oracle mismatch). Errors are
//! written to stderr as one JSON object.

pub mod demo;
pub mod problem;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::closed_form::{formula_audit, AuditCase};
use crate::coeff::CoefficientSequence;
use crate::eigen::{
    char_polynomial, classify_eigenseq, eigenseq_from_seed, eigenseq_from_unitary, eigenvalues_constant,
    poincare_perron_check, verify_at, EigenVerdict, Eigensequence, Side,
};
use crate::error::{Error, Result};
use crate::factor::{cascade_factorize, sc_factorize, EigenInput, ScFactorization};
use crate::nonrecursive::{cofactor_reconstruct, enumerate_nonrecursive, solved_form, split_nonrecursive};
use crate::periodic::{find_periodic_eigenseq, CandidateVerdict, PeriodicCandidate, PeriodicOutcome};
use crate::recurrence::{iterate, SolutionStream};
use crate::ring::{DynRing, Ring, RingValue};

pub use problem::{EigenSpec, Options, Problem, ProblemFile, RecurrenceSpec};
pub use render::{Format, Rendered, Report, Table};

/// Default cap on horizons, overridable through SCFACT_MAX_TERMS.
pub const DEFAULT_MAX_TERMS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "scfact", version, about = "Eigensequences and semiconjugate factorizations of linear recurrences over rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the recurrence directly.
    Solve(Common),
    /// Eigensequence from seeds, or from the ratios of the solution.
    Eigenseq(Common),
    /// Factor and cofactor solution, checked against direct iteration.
    Factorize(Common),
    /// Period-p eigensequences of an order-2 recurrence with periodic coefficients.
    Periodic(Common),
    /// Eigenvalues of a constant-coefficient recurrence.
    Roots(Common),
    /// Convergence of an eigensequence to the limiting eigenvalues.
    Pp(Common),
    /// Enumerate solutions of an order-2 equation whose leading coefficient is not a unit.
    Nonrecursive(Common),
    /// Print one of the built-in worked examples.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Compare closed-form variants with direct iteration.
    Audit {
        /// One case as JSON, e.g. '{"case":"chebyshev","s":0.5,"x0":1,"x1":0.5}'; all defaults when omitted.
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Print the JSON schema of problem files or of JSON reports.
    Schema {
        #[arg(long, value_enum, default_value = "problem")]
        output: SchemaKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Fibonacci,
    Chebyshev,
    Bessel,
    Z7Periodic,
    Z8Nonrecursive,
    Boolean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemaKind {
    Problem,
    Report,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Problem file, or a directory of *.json problem files.
    #[arg(long, value_name = "PATH", required_unless_present = "inline_json", conflicts_with = "inline_json")]
    pub ring_file: Option<PathBuf>,
    /// Problem given directly as JSON text.
    #[arg(long, value_name = "JSON")]
    pub inline_json: Option<String>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Eigensequence seed r_i, in order; repeat for each seed.
    #[arg(long = "seed", value_name = "V", allow_hyphen_values = true)]
    pub seeds: Vec<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Cross-check against direct iteration (default).
    #[arg(long, overrides_with = "no_verify")]
    pub verify: bool,
    #[arg(long, overrides_with = "verify")]
    pub no_verify: bool,
}

/// Run with process stdout and stderr; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let max_terms = match max_terms() {
        Ok(m) => m,
        Err(e) => return report_error(&e, err),
    };
    match cli.command {
        Command::Demo { name, format } => emit(demo::demo(name), format, out, err),
        Command::Audit { case, horizon, format } => emit(audit(case.as_deref(), horizon, max_terms), format, out, err),
        Command::Schema { output } => {
            let schema = match output {
                SchemaKind::Problem => schemars::schema_for!(ProblemFile),
                SchemaKind::Report => schemars::schema_for!(Report),
            };
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&schema).expect("schema serializes"));
            0
        }
        command => {
            let (kind, common) = match &command {
                Command::Solve(c) => (Kind::Solve, c),
                Command::Eigenseq(c) => (Kind::Eigenseq, c),
                Command::Factorize(c) => (Kind::Factorize, c),
                Command::Periodic(c) => (Kind::Periodic, c),
                Command::Roots(c) => (Kind::Roots, c),
                Command::Pp(c) => (Kind::Pp, c),
                Command::Nonrecursive(c) => (Kind::Nonrecursive, c),
                _ => unreachable!("handled above"),
            };
            run_problems(kind, common, max_terms, out, err)
        }
    }
}

fn max_terms() -> Result<usize> {
    match std::env::var("SCFACT_MAX_TERMS") {
        Err(_) => Ok(DEFAULT_MAX_TERMS),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidValue(format!("SCFACT_MAX_TERMS must be a nonnegative integer, got {s:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Solve,
    Eigenseq,
    Factorize,
    Periodic,
    Roots,
    Pp,
    Nonrecursive,
}

fn run_problems(kind: Kind, common: &Common, max_terms: usize, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Some(text) = &common.inline_json {
        return run_one(kind, common, Problem::from_text(text, "inline JSON", common.tolerance), max_terms, out, err);
    }
    let path = common.ring_file.as_deref().expect("clap requires a problem source");
    if !path.is_dir() {
        return run_one(kind, common, Problem::from_path(path, common.tolerance), max_terms, out, err);
    }
    let files = match problem_files(path) {
        Ok(f) => f,
        Err(e) => return report_error(&e, err),
    };
    let mut worst = 0;
    for (i, file) in files.iter().enumerate() {
        let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let _ = writeln!(out, "{}== {name} ==", if i > 0 { "\n" } else { "" });
        let code = run_one(kind, common, Problem::from_path(file, common.tolerance), max_terms, out, err);
        worst = worst.max(code);
    }
    worst
}

fn problem_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::InvalidValue(format!("{}: cannot list: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidValue(format!("{}: no *.json problem files", dir.display())));
    }
    Ok(files)
}

fn run_one(
    kind: Kind,
    common: &Common,
    problem: Result<Problem>,
    max_terms: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let problem = match problem {
        Ok(p) => p,
        Err(e) => return report_error(&e, err),
    };
    let format = common.format.or(problem.file.options.format).unwrap_or(Format::Table);
    let ctx = Ctx { common, problem: &problem, max_terms };
    let result = match kind {
        Kind::Solve => cmd_solve(&ctx),
        Kind::Eigenseq => cmd_eigenseq(&ctx),
        Kind::Factorize => cmd_factorize(&ctx),
        Kind::Periodic => cmd_periodic(&ctx),
        Kind::Roots => cmd_roots(&ctx),
        Kind::Pp => cmd_pp(&ctx),
        Kind::Nonrecursive => cmd_nonrecursive(&ctx),
    };
    emit(result, format, out, err)
}

fn emit(result: Result<Rendered>, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match result.and_then(|r| r.render(format)) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => report_error(&e, err),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        2
    } else {
        3
    }
}

/// Structured form of an error, with the witness fields of the variant.
pub fn error_json(e: &Error) -> Value {
    let mut v = json!({"error": e.kind(), "message": e.to_string(), "exit_code": exit_code(e)});
    let details = match e {
        Error::NotAUnit { value, witness } => json!({"value": value, "witness": witness}),
        Error::NonUnitTerm { n, culprit, class } => json!({"n": n, "culprit": culprit, "class": class}),
        Error::Parse { offset, .. } => json!({"offset": offset}),
        Error::Eval { n, .. } | Error::Exhausted(n) => json!({"n": n}),
        Error::NotAnEigensequence { n, residual } => json!({"n": n, "residual": residual}),
        Error::HypothesisViolated { n, point, .. } => json!({"n": n, "point": point}),
        Error::StageFailed { depth, .. } => json!({"depth": depth}),
        Error::WrongRegion { point, .. } => json!({"point": point}),
        Error::OracleMismatch { n, expected, actual } => json!({"n": n, "expected": expected, "actual": actual}),
        Error::HorizonTooLarge { requested, limit } => json!({"requested": requested, "limit": limit}),
        _ => Value::Null,
    };
    if let (Value::Object(map), Value::Object(extra)) = (&mut v, details) {
        map.extend(extra);
    }
    v
}

fn report_error(e: &Error, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "{}", error_json(e));
    exit_code(e)
}

struct Ctx<'a> {
    common: &'a Common,
    problem: &'a Problem,
    max_terms: usize,
}

impl Ctx<'_> {
    fn ring(&self) -> &DynRing {
        &self.problem.ring
    }

    fn options(&self) -> &Options {
        &self.problem.file.options
    }

    fn horizon(&self, default: usize) -> Result<usize> {
        let h = self.common.horizon.or(self.options().horizon).unwrap_or(default);
        if h > self.max_terms {
            return Err(Error::HorizonTooLarge { requested: h, limit: self.max_terms });
        }
        Ok(h)
    }

    fn verify(&self) -> bool {
        if self.common.no_verify {
            false
        } else if self.common.verify {
            true
        } else {
            self.options().verify.unwrap_or(true)
        }
    }

    /// --seed values, else options.seeds; empty when neither is given.
    fn seeds(&self) -> Result<Vec<RingValue>> {
        if !self.common.seeds.is_empty() {
            let values: Vec<Value> = self
                .common
                .seeds
                .iter()
                .map(|s| serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.clone())))
                .collect();
            return self.problem.parse_values(&values, "--seed");
        }
        match &self.options().seeds {
            Some(v) => self.problem.parse_values(v, "options.seeds"),
            None => Ok(Vec::new()),
        }
    }

    fn tolerance(&self) -> Option<f64> {
        self.common.tolerance.or(self.options().tolerance)
    }

    fn rendered(&self, command: &str, result: Value) -> Rendered {
        Rendered::new(command, Some(self.problem.file.ring.to_string()), result)
    }
}

fn fmt(ring: &DynRing, x: &RingValue) -> String {
    ring.format(x)
}

fn fmt_list<R: Ring>(ring: &R, xs: &[R::Elem]) -> String {
    xs.iter().map(|x| ring.format(x)).collect::<Vec<_>>().join(", ")
}

fn json_list<R: Ring>(ring: &R, xs: &[R::Elem]) -> Vec<Value> {
    xs.iter().map(|x| ring.to_json(x)).collect()
}

fn oracle_line(verified: bool, horizon: usize) -> String {
    if verified {
        format!("oracle: agrees with direct iteration for n <= {horizon}")
    } else {
        "oracle: not checked".to_string()
    }
}

fn cmd_solve(ctx: &Ctx) -> Result<Rendered> {
    let rec = ctx.problem.recursive()?;
    let ring = ctx.ring();
    let h = ctx.horizon(10)?;
    let xs = iterate(&rec, h)?.into_terms();
    let verify = ctx.verify();
    if verify {
        for n in rec.k()..h {
            let r = rec.residual(&xs, n)?;
            if !ring.is_zero(&r) {
                return Err(Error::OracleMismatch { n: n + 1, expected: "zero residual".into(), actual: fmt(ring, &r) });
            }
        }
    }
    let start = rec.start_index;
    let mut table = Table::new(&["n", "x"]);
    for (n, x) in xs.iter().enumerate() {
        table.push(vec![(n as i64 + start).to_string(), fmt(ring, x)]);
    }
    let terms: Vec<Value> = xs.iter().enumerate().map(|(n, x)| json!({"n": n as i64 + start, "x": ring.to_json(x)})).collect();
    let mut result = json!({"recurrence": ctx.problem.raw.to_json(), "terms": terms, "verified": verify});
    result["recurrence"]["leading"] = ring.to_json(&ctx.problem.leading);
    let mut r = ctx.rendered("solve", result);
    if verify {
        r = r.note(format!("residual: zero for n <= {h}"));
    }
    Ok(r.table(table))
}

fn classification_line(c: &crate::eigen::EigenClassification, up_to: usize) -> String {
    let verdict = match c.verdict {
        EigenVerdict::Unitary => "unitary",
        EigenVerdict::Improper => "improper",
        EigenVerdict::ProperNonUnitary => "proper, not unitary",
        EigenVerdict::Undecidable => "undecidable",
    };
    match &c.witness {
        None => format!("classification: {verdict} through n = {up_to}"),
        Some(w) => format!("classification: {verdict} (r_{} is {})", w.n, w.class),
    }
}

fn cmd_eigenseq(ctx: &Ctx) -> Result<Rendered> {
    let rec = ctx.problem.recursive()?;
    let ring = ctx.ring();
    let h = ctx.horizon(10)?;
    let seeds = ctx.seeds()?;
    let (e, source) = if seeds.is_empty() {
        (eigenseq_from_unitary(iterate(&rec, h)?, Side::Right)?, "ratios of the solution".to_string())
    } else {
        let s = format!("seeds ({})", fmt_list(ring, &seeds));
        (eigenseq_from_seed(&rec, seeds, h)?, s)
    };
    let terms = e.prefix(h)?;
    let class = classify_eigenseq(&e, h)?;
    let verify = ctx.verify();
    if verify {
        for n in rec.k()..h {
            verify_at(&rec, &e, n)?;
        }
    }
    let mut table = Table::new(&["n", "r"]);
    for (i, r) in terms.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), fmt(ring, r)]);
    }
    let result = json!({
        "source": source,
        "terms": json_list(ring, &terms),
        "classification": class,
        "verified": verify,
    });
    let mut r = ctx.rendered("eigenseq", result).note(format!("source: {source}")).note(classification_line(&class, h));
    if verify {
        r = r.note(format!("characteristic equation: holds for n <= {}", h.saturating_sub(1)));
    }
    Ok(r.table(table))
}

/// Factor-equation coefficients a'_{m,n}, used as t_{n+1} = Σ a'_{m,n}·t_{n−m} + b'_n.
fn factor_coefficient(f: &ScFactorization<DynRing>, m: usize, n: usize) -> Result<Option<RingValue>> {
    match &f.factor {
        Some(fac) if n >= fac.order() => Ok(Some(fac.coeff(m, n - 1)?)),
        _ => Ok(None),
    }
}

/// Rows n = 0..=h of x_n, α_n, t_n and the factor coefficients a'_{m,n}.
pub(crate) fn factor_table(
    ring: &DynRing,
    f: &ScFactorization<DynRing>,
    x: &[RingValue],
    t: &[RingValue],
    h: usize,
) -> Result<Table> {
    let order = f.factor.as_ref().map_or(0, |g| g.order());
    let mut header: Vec<String> = ["n", "x", "alpha", "t"].iter().map(|s| s.to_string()).collect();
    header.extend((0..order).map(|m| format!("a'{m}")));
    let mut table = Table { title: None, header, rows: Vec::new() };
    let alphas = f.alpha.prefix(h)?;
    for n in 0..=h {
        let mut row = vec![n.to_string(), fmt(ring, &x[n])];
        if n == 0 {
            row.extend([String::new(), String::new()]);
        } else {
            row.extend([fmt(ring, &alphas[n - 1]), fmt(ring, &t[n - 1])]);
        }
        for m in 0..order {
            let v = if n == 0 { None } else { factor_coefficient(f, m, n)? };
            row.push(v.map(|v| fmt(ring, &v)).unwrap_or_default());
        }
        table.push(row);
    }
    Ok(table)
}

fn cmd_factorize(ctx: &Ctx) -> Result<Rendered> {
    let rec = ctx.problem.recursive()?;
    let ring = ctx.ring();
    let h = ctx.horizon(10)?;
    let verify = ctx.verify();
    let seeds = ctx.seeds()?;
    let single = if !seeds.is_empty() {
        let s = format!("seeds ({})", fmt_list(ring, &seeds));
        Some((eigenseq_from_seed(&rec, seeds, h + 1)?, s))
    } else if let Some(u) = &ctx.options().unitary {
        let init = ctx.problem.parse_values(u, "options.unitary")?;
        let s = format!("ratios of the solution from ({})", fmt_list(ring, &init));
        let stream = SolutionStream::new(std::sync::Arc::new(rec.homogeneous().with_initials(init)?));
        Some((eigenseq_from_unitary(stream, Side::Right)?, s))
    } else {
        None
    };
    if let Some((alpha, source)) = single {
        let f = sc_factorize(&rec, alpha)?;
        let sol = f.solve(h, verify)?;
        let order = f.factor.as_ref().map_or(0, |g| g.order());
        let table = factor_table(ring, &f, &sol.x, &sol.t, h)?;
        let result = json!({
            "mode": "single",
            "source": source,
            "factorization": f.to_json(h)?,
            "x": json_list(ring, &sol.x),
            "t": json_list(ring, &sol.t),
            "verified": sol.verified,
        });
        return Ok(ctx
            .rendered("factorize", result)
            .note(format!("alpha: {source}"))
            .note(format!("factor order {order}, cofactor x(n+1) = alpha(n+1)*x(n) + t(n+1)"))
            .note(oracle_line(sol.verified, h))
            .table(table));
    }
    let inputs: Vec<EigenInput<RingValue>> = match &ctx.options().eigen {
        Some(specs) => specs
            .iter()
            .enumerate()
            .map(|(i, s)| eigen_input(ctx.problem, s, i))
            .collect::<Result<_>>()?,
        None if rec.coeffs.iter().all(|c| c.as_constant().is_some()) => vec![EigenInput::Discover; rec.k()],
        None => {
            return Err(Error::InvalidValue(
                "no eigensequence source: give --seed, options.unitary or options.eigen".into(),
            ))
        }
    };
    let sys = cascade_factorize(&rec, &inputs)?;
    let levels = sys.solve(h, verify)?;
    let mut header = vec!["n".to_string(), "x".to_string()];
    header.extend((1..levels.len()).map(|i| format!("level {i}")));
    let mut table = Table { title: None, header, rows: Vec::new() };
    for n in 0..=h {
        table.push(levels.iter().map(|l| l.get(n).map(|v| fmt(ring, v)).unwrap_or_default()).fold(
            vec![n.to_string()],
            |mut row, cell| {
                row.push(cell);
                row
            },
        ));
    }
    let mut r = Rendered::new("factorize", None, Value::Null);
    let mut stages = Vec::new();
    for (i, (stage, source)) in sys.stages.iter().zip(&sys.sources).enumerate() {
        r = r.note(format!("stage {}: order {} via {source}", i + 1, stage.original.order()));
        stages.push(json!({"source": source, "factorization": stage.to_json(h - i)?}));
    }
    let result = json!({
        "mode": "cascade",
        "stages": stages,
        "levels": levels.iter().map(|l| json_list(ring, l)).collect::<Vec<_>>(),
        "verified": verify,
    });
    let mut out = ctx.rendered("factorize", result);
    out.notes = r.notes;
    Ok(out.note(oracle_line(verify, h)).table(table))
}

fn eigen_input(p: &Problem, spec: &EigenSpec, i: usize) -> Result<EigenInput<RingValue>> {
    let what = format!("options.eigen[{i}]");
    Ok(match spec {
        EigenSpec::Eigenvalue(v) => EigenInput::Eigenvalue(p.parse_values(std::slice::from_ref(v), &what)?.remove(0)),
        EigenSpec::Seeds(v) => EigenInput::Seeds(p.parse_values(v, &what)?),
        EigenSpec::UnitarySolution(v) => EigenInput::UnitarySolution(p.parse_values(v, &what)?),
        EigenSpec::Discover => EigenInput::Discover,
    })
}

fn candidate_table<S: Ring>(ring: &S, cs: &[PeriodicCandidate<S>]) -> Table {
    let mut t = Table::new(&["r1", "r1..r(p+1)", "result", "rho"]);
    for c in cs {
        let verdict = match &c.verdict {
            CandidateVerdict::Success => "closes".to_string(),
            CandidateVerdict::NonUnit { n, class } => format!("r_{n} is {class}"),
            CandidateVerdict::NotClosed => "does not close".to_string(),
            CandidateVerdict::ResidualNonzero { n } => format!("residual nonzero at n = {n}"),
        };
        t.push(vec![
            ring.format(&c.r1),
            fmt_list(ring, &c.terms),
            verdict,
            c.rho.as_ref().map(|x| ring.format(x)).unwrap_or_default(),
        ]);
    }
    t
}

fn cmd_periodic(ctx: &Ctx) -> Result<Rendered> {
    let rec = ctx.problem.recursive()?;
    let ring = ctx.ring();
    let search = find_periodic_eigenseq(&rec)?;
    let tb = &search.table;
    let mut table = Table::new(&["j", "a", "b", "alpha", "beta"]);
    for j in 0..=tb.p + 1 {
        table.push(vec![
            j.to_string(),
            fmt(ring, &tb.a[j]),
            fmt(ring, &tb.b[j]),
            fmt(ring, &tb.alpha[j]),
            fmt(ring, &tb.beta[j]),
        ]);
    }
    let mut result = search.to_json(ring);
    let q = &search.quadratic;
    let mut r = Rendered::new("periodic", None, Value::Null)
        .note(format!("period: {}", tb.p))
        .note(format!("quadratic (r^2, r, 1): {}", fmt_list(ring, q)))
        .table(table);
    match &search.outcome {
        PeriodicOutcome::InRing(cs) => r = r.table(candidate_table(ring, cs)),
        PeriodicOutcome::Extended { field, candidates, .. } => {
            r = r.note(format!("roots lie in {}", field.descriptor())).table(candidate_table(field, candidates));
        }
        PeriodicOutcome::NoRoots(msg) => {
            r = r.note(msg.clone());
            let h = ctx.horizon(9)?;
            let seeds = vec![ring.try_one()?; rec.k()];
            match eigenseq_from_seed(&rec, seeds, h).and_then(|e| e.prefix(h)) {
                Ok(terms) => {
                    r = r.note(format!("seeded fallback from r1 = 1: {}", fmt_list(ring, &terms)));
                    result["fallback"] = json!({"seeds": [ring.to_json(&ring.one())], "terms": json_list(ring, &terms)});
                }
                Err(e) => {
                    r = r.note(format!("seeded fallback from r1 = 1 failed: {e}"));
                    result["fallback"] = json!({"error": e.to_string()});
                }
            }
        }
    }
    let mut out = ctx.rendered("periodic", result);
    out.notes = r.notes;
    out.tables = r.tables;
    Ok(out)
}

fn cmd_roots(ctx: &Ctx) -> Result<Rendered> {
    let rec = ctx.problem.recursive()?;
    let ring = ctx.ring();
    let report = eigenvalues_constant(&rec)?;
    let coeffs: Vec<RingValue> = rec
        .coeffs
        .iter()
        .map(|c| c.as_constant().cloned())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidRecurrence("roots needs constant coefficients".into()))?;
    let poly = char_polynomial(ring, &coeffs);
    let mut table = Table::new(&["root", "class"]);
    for x in &report.roots {
        table.push(vec![fmt(ring, x), ring.classify(x).to_string()]);
    }
    let result = json!({
        "polynomial": json_list(ring, &poly),
        "roots": json_list(ring, &report.roots),
        "complete": report.complete,
        "notes": report.notes,
    });
    let mut r = ctx
        .rendered("roots", result)
        .note(format!("characteristic polynomial (lowest degree first): {}", fmt_list(ring, &poly)))
        .note(format!("splits completely: {}", if report.complete { "yes" } else { "no" }));
    for n in &report.notes {
        r = r.note(n.clone());
    }
    Ok(r.table(table))
}

fn cmd_pp(ctx: &Ctx) -> Result<Rendered> {
    let rec = ctx.problem.recursive()?;
    let ring = ctx.ring();
    let limits = match &ctx.options().limits {
        Some(l) => ctx.problem.parse_values(l, "options.limits")?,
        None => return Err(Error::InvalidValue("pp needs options.limits (the limiting coefficients)".into())),
    };
    let h = ctx.horizon(50)?;
    let tail_start = ctx.options().tail_start.unwrap_or((h / 2).max(1));
    let mut seeds = ctx.seeds()?;
    if seeds.is_empty() {
        seeds = vec![ring.try_one()?; rec.k()];
    }
    let tol_f = ctx.tolerance().unwrap_or(0.05);
    let tol = BigRational::from_float(tol_f)
        .ok_or_else(|| Error::InvalidValue(format!("tolerance {tol_f} is not finite")))
        .and_then(|q| ring.from_rational(&q))?;
    let rep = poincare_perron_check(&rec, seeds, limits, h, tail_start, tol)?;
    let mut table = Table::new(&["n", "r"]);
    for (n, x) in &rep.tail {
        table.push(vec![n.to_string(), fmt(ring, x)]);
    }
    let opt = |x: &Option<RingValue>| x.as_ref().map(|v| ring.to_json(v));
    let result = json!({
        "limiting_eigenvalues": json_list(ring, &rep.limiting_eigenvalues),
        "eigenvalue_notes": rep.eigenvalue_notes,
        "coefficient_gap": ring.to_json(&rep.coefficient_gap),
        "tail": rep.tail.iter().map(|(n, x)| json!({"n": n, "r": ring.to_json(x)})).collect::<Vec<_>>(),
        "converged_to": opt(&rep.converged_to),
        "max_deviation": opt(&rep.max_deviation),
    });
    let mut r = ctx
        .rendered("pp", result)
        .note(format!("limiting eigenvalues: {}", fmt_list(ring, &rep.limiting_eigenvalues)))
        .note(format!("coefficient gap at n = {h}: {}", fmt(ring, &rep.coefficient_gap)));
    for n in &rep.eigenvalue_notes {
        r = r.note(n.clone());
    }
    r = r.note(match (&rep.converged_to, &rep.max_deviation) {
        (Some(l), Some(d)) => format!("converges to {} (max deviation {} for n in [{tail_start}, {h}])", fmt(ring, l), fmt(ring, d)),
        (None, Some(d)) => format!("no limiting eigenvalue within tolerance (closest deviation {})", fmt(ring, d)),
        _ => "no limiting eigenvalue in the ring".to_string(),
    });
    Ok(r.table(table))
}

/// Horizontal table: header n = 1..h, one row per named sequence.
pub(crate) fn sequence_table(ring: &DynRing, rows: &[(&str, &[RingValue])]) -> Table {
    let h = rows.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    let mut header = vec!["n".to_string()];
    header.extend((1..=h).map(|n| n.to_string()));
    let mut t = Table { title: None, header, rows: Vec::new() };
    for (name, values) in rows {
        let mut row = vec![name.to_string()];
        row.extend(values.iter().map(|v| fmt(ring, v)));
        t.push(row);
    }
    t
}

/// The pieces of c·x_{n+1} + e·x_n + f·x_{n−1} = 0 read from a problem.
pub(crate) fn nonrecursive_parts(p: &Problem) -> Result<(RingValue, RingValue, RingValue)> {
    let ring = &p.ring;
    let rec = &p.raw;
    if rec.order() != 2 {
        return Err(Error::InvalidRecurrence(format!("nonrecursive needs order 2, got {}", rec.order())));
    }
    let constant = |s: &CoefficientSequence<DynRing>, what: &str| {
        s.as_constant()
            .cloned()
            .ok_or_else(|| Error::InvalidRecurrence(format!("nonrecursive needs a constant {what}")))
    };
    let forcing = constant(&rec.forcing, "forcing")?;
    if !ring.is_zero(&forcing) {
        return Err(Error::InvalidRecurrence("nonrecursive needs a homogeneous equation".into()));
    }
    let e = ring.neg(&constant(&rec.coeffs[0], "a_0")?);
    let f = ring.neg(&constant(&rec.coeffs[1], "a_1")?);
    Ok((p.leading.clone(), e, f))
}

fn cmd_nonrecursive(ctx: &Ctx) -> Result<Rendered> {
    const SHOWN: usize = 8;
    let ring = ctx.ring();
    let (c, e, f) = nonrecursive_parts(ctx.problem)?;
    let h = ctx.horizon(15)?;
    let split = split_nonrecursive(ring, &c, &e, &f)?;
    let x0 = ctx.problem.raw.initials[0].clone();
    let x1 = ctx.problem.raw.initials[1].clone();
    let t1 = ring.sub(&x1, &ring.mul(&split.beta, &x0));
    let sols = enumerate_nonrecursive(ring, &c, &split.d, h, Some(&t1))?;
    let beta = Eigensequence::constant(ring.clone(), split.beta.clone());
    let mut tables = Vec::new();
    let mut shown = Vec::new();
    for (i, t) in sols.sequences.iter().take(SHOWN).enumerate() {
        let x = cofactor_reconstruct(t, &beta, x0.clone(), h)?;
        tables.push(sequence_table(ring, &[("t_n", t), ("x_n", &x[1..])]).titled(format!("solution {}", i + 1)));
        shown.push(json!({"t": json_list(ring, t), "x": json_list(ring, &x)}));
    }
    let solved = solved_form(ring, &c, &e, &f);
    let result = json!({
        "c": ring.to_json(&c),
        "e": ring.to_json(&e),
        "f": ring.to_json(&f),
        "beta": ring.to_json(&split.beta),
        "d": ring.to_json(&split.d),
        "roots": json_list(ring, &split.roots),
        "t1": ring.to_json(&t1),
        "viable": json_list(ring, &sols.viable),
        "successors": sols.successors.iter().map(|(t, s)| json!({"t": ring.to_json(t), "next": json_list(ring, s)})).collect::<Vec<_>>(),
        "count": sols.sequences.len(),
        "truncated": sols.truncated,
        "multiplier": sols.multiplier.as_ref().map(|m| ring.to_json(m)),
        "solved_form": solved.as_ref().map(|(a0, a1)| json!([ring.to_json(a0), ring.to_json(a1)])),
        "sequences": shown,
    });
    let mut r = ctx
        .rendered("nonrecursive", result)
        .note(format!(
            "equation: {}*x(n+1) + {}*x(n) + {}*x(n-1) = 0",
            fmt(ring, &c),
            fmt(ring, &e),
            fmt(ring, &f)
        ))
        .note(format!("roots of c*b^2 + e*b + f: {}", fmt_list(ring, &split.roots)))
        .note(format!(
            "beta = {}, d = {}: {}*t(n+1) + {}*t(n) = 0, x(n+1) = {}*x(n) + t(n+1)",
            fmt(ring, &split.beta),
            fmt(ring, &split.d),
            fmt(ring, &c),
            fmt(ring, &split.d),
            fmt(ring, &split.beta)
        ))
        .note(format!("viable t values: {}", fmt_list(ring, &sols.viable)));
    for (t, next) in &sols.successors {
        r = r.note(format!("  t = {} -> {}", fmt(ring, t), fmt_list(ring, next)));
    }
    r = r.note(format!("t1 = x1 - beta*x0 = {}", fmt(ring, &t1))).note(format!(
        "solutions through n = {h}: {}{}",
        sols.sequences.len(),
        if sols.truncated { " (truncated)" } else { "" }
    ));
    r = r.note(match (&sols.multiplier, &solved) {
        (Some(m), Some((a0, a1))) => format!(
            "unique branch: t(n+1) = {}*t(n); solved form x(n+1) = {}*x(n) + {}*x(n-1)",
            fmt(ring, m),
            fmt(ring, a0),
            fmt(ring, a1)
        ),
        _ => "leading coefficient is not a unit: solutions branch".to_string(),
    });
    if sols.sequences.len() > SHOWN {
        r = r.note(format!("showing the first {SHOWN}"));
    }
    r.tables = tables;
    Ok(r)
}

/// Cases run when `audit` gets no --case.
pub fn default_audit_cases() -> Vec<AuditCase> {
    vec![
        AuditCase::Conjugate { f: 1.0, g: -1.0, x0: 1.0, x1: 2.0 },
        AuditCase::Chebyshev { s: 0.5, x0: 1.0, x1: 1.0 },
        AuditCase::BesselU4 { s: 2.0 },
        AuditCase::BesselSum { s: 1.0, x0: 1.0, x1: 2.0 },
    ]
}

fn audit(case: Option<&str>, horizon: usize, max_terms: usize) -> Result<Rendered> {
    if horizon > max_terms {
        return Err(Error::HorizonTooLarge { requested: horizon, limit: max_terms });
    }
    let cases = match case {
        None => default_audit_cases(),
        Some(text) => vec![serde_json::from_str::<AuditCase>(text)
            .map_err(|e| Error::InvalidValue(format!("--case: {e}")))?],
    };
    let mut reports = Vec::new();
    let mut r = Rendered::new("audit", Some("R".into()), Value::Null);
    for case in cases {
        let rep = formula_audit(case, horizon)?;
        let head = serde_json::to_value(&rep.case).expect("case serializes");
        let mut t = Table::new(&["n", "oracle", "corrected", "variant"]).titled(audit_title(&head));
        for row in &rep.rows {
            t.push(vec![
                row.n.to_string(),
                crate::format::fmt_float(row.oracle),
                crate::format::fmt_float(row.corrected),
                crate::format::fmt_float(row.variant),
            ]);
        }
        let f = crate::format::fmt_float;
        let mut summary = Table::new(&["", "corrected", "variant"]);
        summary.push(vec!["max deviation".into(), f(rep.corrected_max_deviation), f(rep.variant_max_deviation)]);
        if let Some((c, v)) = rep.sine_coefficients {
            summary.push(vec!["sine coefficient".into(), f(c), f(v)]);
        }
        r = r.table(t).table(summary);
        reports.push(serde_json::to_value(&rep).expect("report serializes"));
    }
    r.report.result = Value::Array(reports);
    Ok(r)
}

fn audit_title(case: &Value) -> String {
    let Value::Object(map) = case else { return String::new() };
    let name = map.get("case").and_then(Value::as_str).unwrap_or("");
    let params: Vec<String> = map.iter().filter(|(k, _)| *k != "case").map(|(k, v)| format!("{k} = {v}")).collect();
    format!("{name}: {}", params.join(", "))
}
