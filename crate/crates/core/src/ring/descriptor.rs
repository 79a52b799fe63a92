use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_tol() -> f64 {
    1e-12
}

fn default_universe() -> u32 {
    16
}

/// Which ring a problem lives in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RingDescriptor {
    Integer,
    Rational,
    Modular {
        m: u64,
    },
    /// ℚ(√d).
    QuadraticExt {
        d: i64,
    },
    /// Subsets of {0, …, universe−1} with symmetric difference and intersection.
    Boolean {
        #[serde(default = "default_universe")]
        universe: u32,
    },
    /// Real functions sampled on a finite grid.
    Sampled {
        grid: Vec<f64>,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Real {
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

impl RingDescriptor {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDescriptor(m));
        match self {
            RingDescriptor::Integer | RingDescriptor::Rational => Ok(()),
            RingDescriptor::Modular { m } if *m < 2 => bad(format!("modulus must be at least 2, got {m}")),
            RingDescriptor::Modular { m } if *m > u32::MAX as u64 => {
                bad(format!("modulus {m} is too large"))
            }
            RingDescriptor::Modular { .. } => Ok(()),
            RingDescriptor::QuadraticExt { d } => {
                if !is_squarefree(*d) || *d == 1 {
                    bad(format!("d = {d} must be square-free and not a perfect square"))
                } else {
                    Ok(())
                }
            }
            RingDescriptor::Boolean { universe } => {
                if *universe == 0 || *universe > 128 {
                    bad(format!("universe size must be in 1..=128, got {universe}"))
                } else {
                    Ok(())
                }
            }
            RingDescriptor::Sampled { grid, tol } => {
                if grid.is_empty() {
                    return bad("sampling grid is empty".into());
                }
                if grid.iter().any(|x| !x.is_finite()) {
                    return bad("sampling grid has a non-finite point".into());
                }
                for (i, x) in grid.iter().enumerate() {
                    if grid[..i].contains(x) {
                        return bad(format!("grid point {x} is repeated"));
                    }
                }
                check_tol(*tol)
            }
            RingDescriptor::Real { tol } => check_tol(*tol),
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDescriptor(format!("tolerance must be finite and nonnegative, got {tol}")))
    }
}

/// True when no square > 1 divides d (0 and 1 excluded by callers as needed).
pub(crate) fn is_squarefree(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Integer => write!(f, "Z"),
            RingDescriptor::Rational => write!(f, "Q"),
            RingDescriptor::Modular { m } => write!(f, "Z/{m}"),
            RingDescriptor::QuadraticExt { d } => write!(f, "Q(sqrt({d}))"),
            RingDescriptor::Boolean { universe } => write!(f, "Boolean({universe})"),
            RingDescriptor::Sampled { grid, .. } => write!(f, "Sampled({} points)", grid.len()),
            RingDescriptor::Real { .. } => write!(f, "R"),
        }
    }
}
