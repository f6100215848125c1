#![allow(dead_code)]

use jorca_core::engine::OutcomeConstraint;
use jorca_core::field::GainSchedule;
use jorca_core::quantum::Analyzer;
use jorca_core::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Hand-derived maximum gain. Inverting one pair gives
/// `I_in = (|x|^2 + |y|^2) cosh 2g - 2 sinh 2g Im(x y)`, so on the
/// constrained finals the gain is `-P|u|^2 - R|v|^2 + 2 Im(K u v)` and its
/// maximum over `|u|^2 + |v|^2 = 1` is the top eigenvalue of
/// `[[-P, |K|], [|K|, -R]]`.
pub fn lambda_closed_form(oc: &OutcomeConstraint, s: &GainSchedule) -> f64 {
    let [c, d, f, g] = oc.coefficients();
    let (ca, cb) = ((2.0 * s.g12()).cosh() - 1.0, (2.0 * s.g34()).cosh() - 1.0);
    let p = c.norm_sqr() * ca + d.norm_sqr() * cb;
    let r = g.norm_sqr() * ca + f.norm_sqr() * cb;
    let k = (2.0 * s.g12()).sinh() * c * g
        + (2.0 * s.g34()).sinh() * Complex64::from_polar(1.0, -s.delta()) * d * f;
    0.5 * (-(p + r) + ((p - r).powi(2) + 4.0 * k.norm_sqr()).sqrt())
}

pub fn random_analyzer(rng: &mut ChaCha8Rng) -> Analyzer {
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        if x.iter().map(|v| v * v).sum::<f64>() > 1e-2 {
            return Analyzer::normalized(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]))
                .unwrap();
        }
    }
}
