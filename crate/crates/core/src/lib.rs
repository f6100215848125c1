//! Classical electromagnetic model of photon-pair generation by parametric
//! down-conversion, and an exact test of whether every quantum
//! zero-probability joint outcome is also a zero-gain outcome classically.
//!
//! Mode convention used everywhere in this crate:
//!
//! | mode | polarization | direction |
//! |------|--------------|-----------|
//! | 1    | H            | k1        |
//! | 2    | V            | k2        |
//! | 3    | V            | k1        |
//! | 4    | H            | k2        |
//!
//! Modes 1 and 2 are the phase-matched pair behind `|HV>`, modes 3 and 4 the
//! pair behind `|VH>`. Photon #1 is read from modes 1 and 3, photon #2 from
//! modes 2 and 4.

pub mod dynamics;
pub mod engine;
pub mod error;
pub mod exact;
pub mod field;
pub mod format;
pub mod jacobi;
pub mod quantum;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest `lambda_max` still classified as "no positive gain".
pub const FORBIDDEN_LAMBDA_TOL: f64 = 1e-12;
/// Quantum probabilities below this are treated as exact zeros.
pub const QUANTUM_ZERO_TOL: f64 = 1e-24;
/// Quantum probabilities above this must be classically reachable.
pub const ALLOWED_PROB_MIN: f64 = 1e-6;
