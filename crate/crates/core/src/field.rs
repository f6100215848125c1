//! Scaled mode amplitudes and the undepleted-pump parametric amplifier.
//!
//! Amplitudes are `A = E / sqrt(omega)`, so `|A|^2` counts photon flux
//! ("intensity"). The pump amplitude and coupling are folded into the
//! per-pair gain exponents of [`GainSchedule`].

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Which side of the amplifier a [`FieldQuad`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Seed,
    Final,
}

/// The four scaled output-mode amplitudes at one time slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldQuad {
    modes: [Complex64; 4],
    stage: Stage,
}

impl FieldQuad {
    pub fn new(modes: [Complex64; 4], stage: Stage) -> Result<Self> {
        if modes.iter().any(|a| !a.is_finite()) {
            return Err(domain("field amplitudes must be finite"));
        }
        Ok(Self { modes, stage })
    }

    pub fn seed(modes: [Complex64; 4]) -> Result<Self> {
        Self::new(modes, Stage::Seed)
    }

    pub fn final_fields(modes: [Complex64; 4]) -> Result<Self> {
        Self::new(modes, Stage::Final)
    }

    pub fn zero(stage: Stage) -> Self {
        Self {
            modes: [Complex64::new(0.0, 0.0); 4],
            stage,
        }
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn modes(&self) -> [Complex64; 4] {
        self.modes
    }

    pub fn a1(&self) -> Complex64 {
        self.modes[0]
    }

    pub fn a2(&self) -> Complex64 {
        self.modes[1]
    }

    pub fn a3(&self) -> Complex64 {
        self.modes[2]
    }

    pub fn a4(&self) -> Complex64 {
        self.modes[3]
    }

    /// Sum of the squared magnitudes of all four modes.
    pub fn intensity(&self) -> f64 {
        self.modes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every mode by a real factor, keeping the stage.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.modes.map(|a| a * factor), self.stage)
    }
}

#[derive(Serialize, Deserialize)]
struct FieldQuadRepr {
    stage: Stage,
    modes: [[f64; 2]; 4],
}

impl Serialize for FieldQuad {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldQuadRepr {
            stage: self.stage,
            modes: self.modes.map(|a| [a.re, a.im]),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldQuad {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldQuadRepr::deserialize(d)?;
        FieldQuad::new(
            repr.modes.map(|[re, im]| Complex64::new(re, im)),
            repr.stage,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Gain exponents of the two phase-matched pairs plus the source phase plate.
///
/// `g12` plays the role of `alpha * T` for modes 1-2, `g34` for modes 3-4.
/// `delta` is applied to mode 3 after amplification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSchedule {
    g12: f64,
    g34: f64,
    delta: f64,
}

impl GainSchedule {
    /// Builds a schedule; `delta` is reduced into `[0, 2pi)`.
    pub fn new(g12: f64, g34: f64, delta: f64) -> Result<Self> {
        if !(g12.is_finite() && g34.is_finite() && delta.is_finite()) {
            return Err(domain("gain schedule values must be finite"));
        }
        if g12 < 0.0 || g34 < 0.0 {
            return Err(domain(format!(
                "gain exponents must be non-negative (got {g12}, {g34})"
            )));
        }
        let mut delta = delta.rem_euclid(TAU);
        if delta >= TAU {
            delta = 0.0;
        }
        Ok(Self { g12, g34, delta })
    }

    /// Equal gain on both pairs and no phase plate.
    pub fn uniform(gain: f64) -> Result<Self> {
        Self::new(gain, gain, 0.0)
    }

    /// Gains `(a * eps, b * eps)`, the classical stand-in for a Schmidt state
    /// with coefficients `a`, `b`.
    pub fn schmidt(a: f64, b: f64, eps: f64, delta: f64) -> Result<Self> {
        Self::new(a * eps, b * eps, delta)
    }

    pub fn g12(&self) -> f64 {
        self.g12
    }

    pub fn g34(&self) -> f64 {
        self.g34
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Amplifies one phase-matched pair:
/// `x_f = x_i cosh g + i y_i* sinh g`, `y_f = y_i cosh g + i x_i* sinh g`.
fn amplify_pair(x: Complex64, y: Complex64, gain: f64) -> (Complex64, Complex64) {
    let (ch, sh) = (gain.cosh(), gain.sinh());
    let i = Complex64::i();
    (x * ch + i * y.conj() * sh, y * ch + i * x.conj() * sh)
}

/// Inverse of [`amplify_pair`]: the same form with the sign of `i` flipped.
fn deamplify_pair(x: Complex64, y: Complex64, gain: f64) -> (Complex64, Complex64) {
    let (ch, sh) = (gain.cosh(), gain.sinh());
    let i = Complex64::i();
    (x * ch - i * y.conj() * sh, y * ch - i * x.conj() * sh)
}

fn require_stage(q: &FieldQuad, stage: Stage) -> Result<()> {
    if q.stage != stage {
        return Err(domain(format!(
            "expected {stage:?} fields, got {:?}",
            q.stage
        )));
    }
    Ok(())
}

/// Maps seed amplitudes to final amplitudes, then applies the source phase
/// plate `exp(i delta)` to mode 3.
pub fn forward_amplify(seed: &FieldQuad, sched: &GainSchedule) -> Result<FieldQuad> {
    require_stage(seed, Stage::Seed)?;
    let [s1, s2, s3, s4] = seed.modes;
    let (f1, f2) = amplify_pair(s1, s2, sched.g12);
    let (f3, f4) = amplify_pair(s3, s4, sched.g34);
    let f3 = f3 * Complex64::from_polar(1.0, sched.delta);
    FieldQuad::final_fields([f1, f2, f3, f4])
}

/// Recovers the unique seed that [`forward_amplify`] maps onto `fin`.
pub fn inverse_amplify(fin: &FieldQuad, sched: &GainSchedule) -> Result<FieldQuad> {
    require_stage(fin, Stage::Final)?;
    let [f1, f2, f3, f4] = fin.modes;
    let f3 = f3 * Complex64::from_polar(1.0, -sched.delta);
    let (s1, s2) = deamplify_pair(f1, f2, sched.g12);
    let (s3, s4) = deamplify_pair(f3, f4, sched.g34);
    FieldQuad::seed([s1, s2, s3, s4])
}

/// Intensity gains `(|A1f|^2 - |A1i|^2, |A3f|^2 - |A3i|^2)`.
///
/// Under the amplifier these equal the gains of modes 2 and 4 respectively,
/// so two numbers describe all four modes.
pub fn pair_gain(seed: &FieldQuad, fin: &FieldQuad) -> Result<(f64, f64)> {
    require_stage(seed, Stage::Seed)?;
    require_stage(fin, Stage::Final)?;
    Ok((
        fin.a1().norm_sqr() - seed.a1().norm_sqr(),
        fin.a3().norm_sqr() - seed.a3().norm_sqr(),
    ))
}
