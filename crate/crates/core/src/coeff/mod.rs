//! Coefficient and forcing sequences a_{j,n}, b_n indexed from n = 0.

pub mod expr;

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::ring::Ring;
pub use expr::{parse_expression, Expr};

/// A sequence computed by arbitrary code, used for derived coefficients.
pub trait SequenceFn<R: Ring>: Send + Sync {
    fn eval(&self, ring: &R, n: usize) -> Result<R::Elem>;

    fn describe(&self) -> String {
        "derived sequence".into()
    }
}

impl<R: Ring, F> SequenceFn<R> for F
where
    F: Fn(&R, usize) -> Result<R::Elem> + Send + Sync,
{
    fn eval(&self, ring: &R, n: usize) -> Result<R::Elem> {
        self(ring, n)
    }
}

#[derive(Clone)]
pub enum CoefficientSequence<R: Ring> {
    Constant(R::Elem),
    /// values[(n − offset) mod p]; offset 1 reproduces tables that start at a₁.
    Periodic { values: Vec<R::Elem>, offset: usize },
    /// values[n] while n < len, then tail.
    Table { values: Vec<R::Elem>, tail: R::Elem },
    Formula(Arc<Expr>),
    Custom(Arc<dyn SequenceFn<R>>),
}

impl<R: Ring> fmt::Debug for CoefficientSequence<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientSequence::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            CoefficientSequence::Periodic { values, offset } => f
                .debug_struct("Periodic")
                .field("values", values)
                .field("offset", offset)
                .finish(),
            CoefficientSequence::Table { values, tail } => {
                f.debug_struct("Table").field("values", values).field("tail", tail).finish()
            }
            CoefficientSequence::Formula(e) => write!(f, "Formula({e})"),
            CoefficientSequence::Custom(g) => write!(f, "Custom({})", g.describe()),
        }
    }
}

impl<R: Ring> CoefficientSequence<R> {
    pub fn constant(v: R::Elem) -> Self {
        CoefficientSequence::Constant(v)
    }

    pub fn periodic(values: Vec<R::Elem>, offset: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidValue("periodic sequence needs at least one value".into()));
        }
        Ok(CoefficientSequence::Periodic { values, offset })
    }

    pub fn formula(text: &str, ring: &R) -> Result<Self> {
        Ok(CoefficientSequence::Formula(Arc::new(parse_expression(text, ring)?)))
    }

    pub fn custom(f: impl Fn(&R, usize) -> Result<R::Elem> + Send + Sync + 'static) -> Self {
        CoefficientSequence::Custom(Arc::new(f))
    }

    pub fn eval(&self, ring: &R, n: usize) -> Result<R::Elem> {
        match self {
            CoefficientSequence::Constant(v) => Ok(v.clone()),
            CoefficientSequence::Periodic { values, offset } => {
                let p = values.len() as i128;
                let i = (n as i128 - *offset as i128).rem_euclid(p) as usize;
                Ok(values[i].clone())
            }
            CoefficientSequence::Table { values, tail } => {
                Ok(values.get(n).cloned().unwrap_or_else(|| tail.clone()))
            }
            CoefficientSequence::Formula(e) => e.eval(ring, n),
            CoefficientSequence::Custom(g) => g.eval(ring, n),
        }
    }

    /// Declared period: 1 for constants, the list length for periodic sequences.
    pub fn period(&self) -> Option<usize> {
        match self {
            CoefficientSequence::Constant(_) => Some(1),
            CoefficientSequence::Periodic { values, .. } => Some(values.len()),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<&R::Elem> {
        match self {
            CoefficientSequence::Constant(v) => Some(v),
            _ => None,
        }
    }

    /// Same sequence over another ring, converting stored values with `f`.
    pub fn lift<S: Ring>(
        &self,
        from: &R,
        f: Arc<dyn Fn(&R::Elem) -> Result<S::Elem> + Send + Sync>,
    ) -> Result<CoefficientSequence<S>> {
        Ok(match self {
            CoefficientSequence::Constant(v) => CoefficientSequence::Constant(f(v)?),
            CoefficientSequence::Periodic { values, offset } => CoefficientSequence::Periodic {
                values: values.iter().map(|v| f(v)).collect::<Result<_>>()?,
                offset: *offset,
            },
            CoefficientSequence::Table { values, tail } => CoefficientSequence::Table {
                values: values.iter().map(|v| f(v)).collect::<Result<_>>()?,
                tail: f(tail)?,
            },
            CoefficientSequence::Formula(e) => CoefficientSequence::Formula(e.clone()),
            CoefficientSequence::Custom(g) => {
                let g = g.clone();
                let from = from.clone();
                CoefficientSequence::custom(move |_: &S, n| f(&g.eval(&from, n)?))
            }
        })
    }

    pub fn to_json(&self, ring: &R) -> Value {
        match self {
            CoefficientSequence::Constant(v) => json!({"kind": "constant", "value": ring.to_json(v)}),
            CoefficientSequence::Periodic { values, offset } => json!({
                "kind": "periodic",
                "period": values.len(),
                "offset": offset,
                "values": values.iter().map(|v| ring.to_json(v)).collect::<Vec<_>>(),
            }),
            CoefficientSequence::Table { values, tail } => json!({
                "kind": "table",
                "values": values.iter().map(|v| ring.to_json(v)).collect::<Vec<_>>(),
                "tail": ring.to_json(tail),
            }),
            CoefficientSequence::Formula(e) => json!({"kind": "formula", "expr": e.to_string()}),
            CoefficientSequence::Custom(g) => json!({"kind": "derived", "description": g.describe()}),
        }
    }

    /// Accepts a tagged object or a bare ring value (read as a constant).
    pub fn from_json(ring: &R, v: &Value) -> Result<Self> {
        let obj = match v {
            Value::Object(map) if map.contains_key("kind") => map,
            other => return Ok(CoefficientSequence::Constant(ring.parse_json(other)?)),
        };
        let kind = obj["kind"]
            .as_str()
            .ok_or_else(|| Error::InvalidValue("sequence kind must be a string".into()))?;
        let allowed: &[&str] = match kind {
            "constant" => &["value"],
            "periodic" => &["period", "offset", "values"],
            "table" => &["values", "tail"],
            "formula" => &["expr"],
            other => return Err(Error::InvalidValue(format!("unknown sequence kind {other:?}"))),
        };
        if let Some(extra) = obj.keys().find(|k| *k != "kind" && !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidValue(format!("unknown field {extra:?} in {kind} sequence")));
        }
        let field = |name: &str| -> Result<&Value> {
            obj.get(name)
                .ok_or_else(|| Error::InvalidValue(format!("{kind} sequence needs field {name:?}")))
        };
        let values = |obj: &Map<String, Value>| -> Result<Vec<R::Elem>> {
            match obj.get("values") {
                Some(Value::Array(items)) => items.iter().map(|x| ring.parse_json(x)).collect(),
                _ => Err(Error::InvalidValue(format!("{kind} sequence needs a \"values\" array"))),
            }
        };
        match kind {
            "constant" => Ok(CoefficientSequence::Constant(ring.parse_json(field("value")?)?)),
            "periodic" => {
                let vals = values(obj)?;
                if let Some(p) = obj.get("period") {
                    if p.as_u64() != Some(vals.len() as u64) {
                        return Err(Error::InvalidValue(format!(
                            "declared period {p} does not match {} values",
                            vals.len()
                        )));
                    }
                }
                let offset = match obj.get("offset") {
                    None => 0,
                    Some(o) => o
                        .as_u64()
                        .ok_or_else(|| Error::InvalidValue("offset must be a nonnegative integer".into()))?
                        as usize,
                };
                CoefficientSequence::periodic(vals, offset)
            }
            "table" => Ok(CoefficientSequence::Table {
                values: values(obj)?,
                tail: ring.parse_json(field("tail")?)?,
            }),
            _ => {
                let text = field("expr")?
                    .as_str()
                    .ok_or_else(|| Error::InvalidValue("expr must be a string".into()))?;
                CoefficientSequence::formula(text, ring)
            }
        }
    }
}
