//! Exact arithmetic for the built-in scenarios.
//!
//! Every coefficient in the canned experiments is a rational multiple of a
//! square root (`1/sqrt 2`, `16/sqrt 337`, `3/5`, ...). Joint amplitudes are
//! sums of two such terms sharing one radicand, so their squares, the
//! outcome probabilities, are exact rationals.

use num_rational::Ratio;

use crate::error::{domain, Error, Result};
use crate::quantum::{Analyzer, TwoQubitState};

pub type Rational = Ratio<i128>;

/// `coeff * sqrt(radicand)` with a square-free positive integer radicand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surd {
    coeff: Rational,
    radicand: i128,
}

fn split_square(mut n: i128) -> (i128, i128) {
    // n = outside^2 * inside with `inside` square-free
    let mut outside = 1;
    let mut p = 2;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            outside *= p;
        }
        p += 1;
    }
    (outside, n)
}

impl Surd {
    pub fn rational(q: Rational) -> Self {
        Self {
            coeff: q,
            radicand: 1,
        }
    }

    pub fn int(n: i128) -> Self {
        Self::rational(Rational::from_integer(n))
    }

    /// `coeff * sqrt(radicand)` for any non-negative rational radicand.
    pub fn new(coeff: Rational, radicand: Rational) -> Result<Self> {
        if *radicand.numer() < 0 {
            return Err(domain("negative radicand"));
        }
        if coeff == Rational::from_integer(0) || *radicand.numer() == 0 {
            return Ok(Self::int(0));
        }
        // sqrt(p/q) = sqrt(p q) / q
        let (p, q) = (*radicand.numer(), *radicand.denom());
        let (outside, inside) = split_square(p * q);
        Ok(Self {
            coeff: coeff * Rational::new(outside, q),
            radicand: inside,
        })
    }

    /// `n / sqrt(m)`.
    pub fn over_sqrt(n: i128, m: i128) -> Result<Self> {
        Self::new(Rational::from_integer(n), Rational::new(1, m))
    }

    pub fn frac(n: i128, d: i128) -> Self {
        Self::rational(Rational::new(n, d))
    }

    pub fn coeff(&self) -> Rational {
        self.coeff
    }

    pub fn radicand(&self) -> i128 {
        self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == Rational::from_integer(0)
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        let (outside, inside) = split_square(self.radicand * other.radicand);
        let coeff = self.coeff * other.coeff * Rational::from_integer(outside);
        if coeff == Rational::from_integer(0) {
            return Self::int(0);
        }
        Surd {
            coeff,
            radicand: inside,
        }
    }

    pub fn neg(&self) -> Surd {
        Surd {
            coeff: -self.coeff,
            radicand: self.radicand,
        }
    }

    /// Sum, when both terms share a radicand (or one is zero).
    pub fn add(&self, other: &Surd) -> Option<Surd> {
        if self.is_zero() {
            return Some(*other);
        }
        if other.is_zero() {
            return Some(*self);
        }
        (self.radicand == other.radicand).then(|| {
            let coeff = self.coeff + other.coeff;
            if coeff == Rational::from_integer(0) {
                Self::int(0)
            } else {
                Surd {
                    coeff,
                    radicand: self.radicand,
                }
            }
        })
    }

    pub fn square(&self) -> Rational {
        self.coeff * self.coeff * Rational::from_integer(self.radicand)
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self.coeff) * (self.radicand as f64).sqrt()
    }
}

pub fn ratio_to_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// A real analyzer `h|H> + v|V>` with exactly unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactAnalyzer {
    pub h: Surd,
    pub v: Surd,
}

impl ExactAnalyzer {
    pub fn new(h: Surd, v: Surd) -> Result<Self> {
        if h.square() + v.square() != Rational::from_integer(1) {
            return Err(domain("exact analyzer is not normalized"));
        }
        Ok(Self { h, v })
    }

    /// `(-v, h)`, orthogonal and (for real analyzers) equal to
    /// [`Analyzer::orthogonal`].
    pub fn orthogonal(&self) -> Self {
        Self {
            h: self.v.neg(),
            v: self.h,
        }
    }

    pub fn to_analyzer(&self) -> Analyzer {
        Analyzer::real(self.h.to_f64(), self.v.to_f64()).expect("exact analyzer is normalized")
    }
}

/// `a|HV> + s b|VH>` with `s = +1` (delta = 0) or `s = -1` (delta = pi).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactState {
    pub a: Surd,
    pub b: Surd,
    pub flipped: bool,
}

impl ExactState {
    pub fn new(a: Surd, b: Surd, flipped: bool) -> Result<Self> {
        let zero = Rational::from_integer(0);
        if a.coeff() < zero || b.coeff() < zero {
            return Err(domain("Schmidt coefficients must be non-negative"));
        }
        if a.square() + b.square() != Rational::from_integer(1) {
            return Err(domain("exact state is not normalized"));
        }
        Ok(Self { a, b, flipped })
    }

    pub fn to_state(&self) -> TwoQubitState {
        let delta = if self.flipped {
            std::f64::consts::PI
        } else {
            0.0
        };
        TwoQubitState::new(self.a.to_f64(), self.b.to_f64(), delta)
            .expect("exact state is normalized")
    }
}

/// `a c g + s b d f` in exact arithmetic.
pub fn exact_amplitude(state: &ExactState, w1: &ExactAnalyzer, w2: &ExactAnalyzer) -> Result<Surd> {
    let first = state.a.mul(&w1.h).mul(&w2.v);
    let mut second = state.b.mul(&w1.v).mul(&w2.h);
    if state.flipped {
        second = second.neg();
    }
    first.add(&second).ok_or_else(|| {
        Error::Numeric(format!(
            "amplitude terms have radicands {} and {}; no exact rational probability",
            first.radicand(),
            second.radicand()
        ))
    })
}

pub fn exact_probability(
    state: &ExactState,
    w1: &ExactAnalyzer,
    w2: &ExactAnalyzer,
) -> Result<Rational> {
    Ok(exact_amplitude(state, w1, w2)?.square())
}
