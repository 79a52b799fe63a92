//! Eigensequences and semiconjugate factorizations of linear difference
//! equations x_{n+1} = a_{0,n}x_n + ⋯ + a_{k,n}x_{n−k} + b_n over commutative rings.
//!
//! Algorithms are generic over [`ring::Ring`]; the aliases below name the
//! common instantiations.

pub mod cli;
pub mod closed_form;
pub mod coeff;
pub mod eigen;
pub mod error;
pub mod factor;
pub mod format;
pub mod nonrecursive;
pub mod periodic;
pub mod recurrence;
pub mod ring;

pub use error::{Error, Result};

/// Recurrence over ℚ.
pub type RationalRecurrence = recurrence::LinearRecurrence<ring::Rationals>;
/// Recurrence over ℤ/m.
pub type ModularRecurrence = recurrence::LinearRecurrence<ring::Zmod>;
/// Recurrence over ℚ(√d).
pub type QuadraticRecurrence = recurrence::LinearRecurrence<ring::QuadraticField>;
/// Recurrence over f64 with tolerance-based comparison.
pub type RealRecurrence = recurrence::LinearRecurrence<ring::RealField<f64>>;
/// Recurrence over f64 functions sampled on a grid.
pub type SampledRecurrence = recurrence::LinearRecurrence<ring::SampledFunctions<f64>>;
/// Recurrence over a ring chosen at run time.
pub type DynRecurrence = recurrence::LinearRecurrence<ring::DynRing>;
