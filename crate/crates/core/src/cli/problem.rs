//! Problem files: a ring, a recurrence and per-command options.

use std::path::Path;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cli::render::Format;
use crate::coeff::CoefficientSequence;
use crate::error::{Error, Result};
use crate::recurrence::LinearRecurrence;
use crate::ring::{DynRing, Ring, RingDescriptor, RingValue};

/// One problem: the ring, the recurrence and optional command settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub ring: RingDescriptor,
    pub recurrence: RecurrenceSpec,
    #[serde(default)]
    pub options: Options,
}

/// c·x_{n+1} = a_{0,n}·x_n + ⋯ + a_{k,n}·x_{n−k} + b_n with initial values x_0..x_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceSpec {
    /// k + 1; checked against the number of coefficients when given.
    #[serde(default)]
    pub order: Option<usize>,
    /// Constant c multiplying x_{n+1}; defaults to 1.
    #[serde(default)]
    pub leading: Option<Value>,
    /// a_0..a_k: ring values (constants) or tagged sequences
    /// ({"kind": "periodic" | "table" | "formula" | "constant", ...}).
    pub coeffs: Vec<Value>,
    #[serde(default)]
    pub forcing: Option<Value>,
    pub initials: Vec<Value>,
    /// Index printed for x_0.
    #[serde(default)]
    pub start_index: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub horizon: Option<usize>,
    /// r_1..r_k for eigensequence commands.
    pub seeds: Option<Vec<Value>>,
    /// Overrides the ring tolerance and the convergence tolerance of `pp`.
    pub tolerance: Option<f64>,
    pub format: Option<Format>,
    /// One entry per cascade stage for `factorize`.
    pub eigen: Option<Vec<EigenSpec>>,
    /// Initial values of a unitary solution whose ratios give α.
    pub unitary: Option<Vec<Value>>,
    /// Limiting coefficients a_0..a_k for `pp`.
    pub limits: Option<Vec<Value>>,
    pub tail_start: Option<usize>,
    pub verify: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum EigenSpec {
    Eigenvalue(Value),
    Seeds(Vec<Value>),
    UnitarySolution(Vec<Value>),
    Discover,
}

/// A problem file after validation, with values parsed in its ring.
#[derive(Debug, Clone)]
pub struct Problem {
    pub file: ProblemFile,
    pub ring: DynRing,
    /// As written, before dividing by the leading coefficient.
    pub raw: LinearRecurrence<DynRing>,
    pub leading: RingValue,
}

impl Problem {
    pub fn from_text(text: &str, origin: &str, tolerance: Option<f64>) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| {
            Error::InvalidValue(format!("{origin}: malformed JSON at line {} column {}: {e}", e.line(), e.column()))
        })?;
        let file: ProblemFile = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            Error::InvalidValue(format!("{origin}: at {path}: {}", e.into_inner()))
        })?;
        Self::from_file(file, origin, tolerance)
    }

    pub fn from_path(path: &Path, tolerance: Option<f64>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidValue(format!("{}: cannot read: {e}", path.display())))?;
        Self::from_text(&text, &path.display().to_string(), tolerance)
    }

    pub fn from_file(mut file: ProblemFile, origin: &str, tolerance: Option<f64>) -> Result<Self> {
        if let Some(t) = tolerance.or(file.options.tolerance) {
            match &mut file.ring {
                RingDescriptor::Sampled { tol, .. } | RingDescriptor::Real { tol } => *tol = t,
                _ => {}
            }
        }
        let at = |what: String| move |e: Error| locate(e, origin, &what);
        file.ring.validate().map_err(at("ring".into()))?;
        let ring = DynRing::new(&file.ring).map_err(at("ring".into()))?;
        let spec = &file.recurrence;
        if let Some(order) = spec.order {
            if order != spec.coeffs.len() {
                return Err(at("recurrence.order".into())(Error::InvalidRecurrence(format!(
                    "order {order} but {} coefficient(s)",
                    spec.coeffs.len()
                ))));
            }
        }
        let coeffs = spec
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, v)| CoefficientSequence::from_json(&ring, v).map_err(at(format!("recurrence.coeffs[{j}]"))))
            .collect::<Result<Vec<_>>>()?;
        let forcing = match &spec.forcing {
            None => CoefficientSequence::Constant(ring.zero()),
            Some(v) => CoefficientSequence::from_json(&ring, v).map_err(at("recurrence.forcing".into()))?,
        };
        let initials = parse_list(&ring, &spec.initials, "recurrence.initials", origin)?;
        let leading = match &spec.leading {
            None => ring.try_one().map_err(at("recurrence.leading".into()))?,
            Some(v) => ring.parse(v).map_err(at("recurrence.leading".into()))?,
        };
        let mut raw = LinearRecurrence::new(ring.clone(), coeffs, forcing, initials).map_err(at("recurrence".into()))?;
        raw.start_index = spec.start_index;
        Ok(Problem { file, ring, raw, leading })
    }

    /// The recurrence solved for x_{n+1}; fails when the leading coefficient is not a unit.
    pub fn recursive(&self) -> Result<LinearRecurrence<DynRing>> {
        let ring = &self.ring;
        if ring.equal(&self.leading, &ring.one()) {
            return Ok(self.raw.clone());
        }
        let inv = ring
            .inverse(&self.leading)
            .map_err(|_| Error::InvalidRecurrence("leading coefficient not a unit; use nonrecursive command".into()))?;
        let scale = |s: &CoefficientSequence<DynRing>| -> Result<CoefficientSequence<DynRing>> {
            Ok(match s {
                CoefficientSequence::Constant(v) => CoefficientSequence::Constant(ring.mul(&inv, v)),
                CoefficientSequence::Periodic { values, offset } => CoefficientSequence::Periodic {
                    values: values.iter().map(|v| ring.mul(&inv, v)).collect(),
                    offset: *offset,
                },
                CoefficientSequence::Table { values, tail } => CoefficientSequence::Table {
                    values: values.iter().map(|v| ring.mul(&inv, v)).collect(),
                    tail: ring.mul(&inv, tail),
                },
                other => {
                    let (other, inv) = (other.clone(), inv.clone());
                    CoefficientSequence::custom(move |r: &DynRing, n| Ok(r.mul(&inv, &other.eval(r, n)?)))
                }
            })
        };
        let mut rec = LinearRecurrence::new(
            ring.clone(),
            self.raw.coeffs.iter().map(scale).collect::<Result<_>>()?,
            scale(&self.raw.forcing)?,
            self.raw.initials.clone(),
        )?;
        rec.start_index = self.raw.start_index;
        Ok(rec)
    }

    pub fn parse_values(&self, values: &[Value], what: &str) -> Result<Vec<RingValue>> {
        parse_list(&self.ring, values, what, "options")
    }
}

fn parse_list(ring: &DynRing, values: &[Value], what: &str, origin: &str) -> Result<Vec<RingValue>> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| ring.parse(v).map_err(|e| locate(e, origin, &format!("{what}[{i}]"))))
        .collect()
}

/// Prefix validation messages with the file and field they concern.
fn locate(e: Error, origin: &str, path: &str) -> Error {
    let msg = format!("{origin}: at {path}: {e}");
    match e {
        Error::InvalidDescriptor(_) => Error::InvalidDescriptor(msg),
        Error::InvalidRecurrence(_) => Error::InvalidRecurrence(msg),
        e if e.is_validation() => Error::InvalidValue(msg),
        e => e,
    }
}
