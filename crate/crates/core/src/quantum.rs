//! Reference quantum predictions for two-photon polarization states.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

const NORM_TOL: f64 = 1e-12;

/// The Schmidt-form state `a|HV> + b e^{i delta}|VH>` with real `a, b >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    a: f64,
    b: f64,
    delta: f64,
}

impl TwoQubitState {
    pub fn new(a: f64, b: f64, delta: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && delta.is_finite()) {
            return Err(domain("state coefficients must be finite"));
        }
        if a < 0.0 || b < 0.0 {
            return Err(domain("Schmidt coefficients must be non-negative"));
        }
        if (a * a + b * b - 1.0).abs() > NORM_TOL {
            return Err(domain(format!("a^2 + b^2 = {} is not 1", a * a + b * b)));
        }
        let mut delta = delta.rem_euclid(TAU);
        if delta >= TAU {
            delta = 0.0;
        }
        Ok(Self { a, b, delta })
    }

    /// `a = cos(theta)`, `b = sin(theta)` for `theta` in `[0, pi/2]`.
    pub fn from_angle(theta: f64, delta: f64) -> Result<Self> {
        Self::new(theta.cos().max(0.0), theta.sin().max(0.0), delta)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.a, self.b, delta)
    }
}

/// A single-photon polarization analyzer state `h|H> + v|V>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Analyzer {
    h: Complex64,
    v: Complex64,
}

impl Analyzer {
    pub fn new(h: Complex64, v: Complex64) -> Result<Self> {
        if !(h.is_finite() && v.is_finite()) {
            return Err(domain("analyzer coefficients must be finite"));
        }
        let n = h.norm_sqr() + v.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(domain(format!("analyzer norm^2 = {n} is not 1")));
        }
        Ok(Self { h, v })
    }

    pub fn real(h: f64, v: f64) -> Result<Self> {
        Self::new(Complex64::new(h, 0.0), Complex64::new(v, 0.0))
    }

    /// Rescales an arbitrary non-zero pair to unit norm.
    pub fn normalized(h: Complex64, v: Complex64) -> Result<Self> {
        let n = (h.norm_sqr() + v.norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(domain("cannot normalize a zero or non-finite analyzer"));
        }
        Self::new(h / n, v / n)
    }

    /// Linear polarization `cos(beta)|H> + sin(beta)|V>`.
    pub fn linear(beta: f64) -> Self {
        Self {
            h: Complex64::new(beta.cos(), 0.0),
            v: Complex64::new(beta.sin(), 0.0),
        }
    }

    pub fn h(&self) -> Complex64 {
        self.h
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    /// The orthogonal analyzer `-v*|H> + h*|V>`.
    pub fn orthogonal(&self) -> Self {
        Self {
            h: -self.v.conj(),
            v: self.h.conj(),
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Analyzer) -> Complex64 {
        self.h.conj() * other.h + self.v.conj() * other.v
    }

    pub fn with_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            h: self.h * p,
            v: self.v * p,
        }
    }
}

/// One analyzer per wing: photon #1 `c|H> + d|V>`, photon #2 `f|H> + g|V>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub wing1: Analyzer,
    pub wing2: Analyzer,
}

impl MeasurementSetting {
    pub fn new(wing1: Analyzer, wing2: Analyzer) -> Self {
        Self { wing1, wing2 }
    }

    pub fn c(&self) -> Complex64 {
        self.wing1.h
    }

    pub fn d(&self) -> Complex64 {
        self.wing1.v
    }

    pub fn f(&self) -> Complex64 {
        self.wing2.h
    }

    pub fn g(&self) -> Complex64 {
        self.wing2.v
    }
}

/// `a c g + b e^{-i delta} d f`.
pub fn joint_amplitude(state: &TwoQubitState, m: &MeasurementSetting) -> Complex64 {
    let source_phase = Complex64::from_polar(1.0, -state.delta);
    state.a * m.c() * m.g() + state.b * source_phase * m.d() * m.f()
}

pub fn joint_probability(state: &TwoQubitState, m: &MeasurementSetting) -> f64 {
    joint_amplitude(state, m).norm_sqr()
}

fn check_basis(basis: &[Analyzer; 2], wing: u8) -> Result<()> {
    let overlap = basis[0].inner(&basis[1]).norm();
    if overlap > NORM_TOL {
        return Err(domain(format!(
            "wing {wing} basis is not orthogonal (overlap {overlap:e})"
        )));
    }
    Ok(())
}

/// Joint probabilities `table[i][j]` for outcome `basis1[i]` on photon #1 and
/// `basis2[j]` on photon #2.
pub fn probability_table(
    state: &TwoQubitState,
    basis1: &[Analyzer; 2],
    basis2: &[Analyzer; 2],
) -> Result<[[f64; 2]; 2]> {
    check_basis(basis1, 1)?;
    check_basis(basis2, 2)?;
    let mut table = [[0.0; 2]; 2];
    for (i, w1) in basis1.iter().enumerate() {
        for (j, w2) in basis2.iter().enumerate() {
            table[i][j] = joint_probability(state, &MeasurementSetting::new(*w1, *w2));
        }
    }
    Ok(table)
}

/// True when the joint probability is below `tol`.
pub fn is_forbidden(state: &TwoQubitState, m: &MeasurementSetting, tol: f64) -> bool {
    joint_probability(state, m) < tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn plus() -> Analyzer {
        Analyzer::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap()
    }

    fn minus() -> Analyzer {
        Analyzer::real(FRAC_1_SQRT_2, -FRAC_1_SQRT_2).unwrap()
    }

    fn bell() -> TwoQubitState {
        TwoQubitState::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0).unwrap()
    }

    fn partial() -> TwoQubitState {
        TwoQubitState::new(0.6, 0.8, 0.0).unwrap()
    }

    #[test]
    fn diagonal_anticorrelation() {
        let m = MeasurementSetting::new(plus(), minus());
        assert!(joint_amplitude(&bell(), &m).norm() < 1e-16);
        let t = probability_table(&bell(), &[plus(), minus()], &[plus(), minus()]).unwrap();
        let expected = [[0.5, 0.0], [0.0, 0.5]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn partial_state_table() {
        let plus_p = Analyzer::real(0.8, 0.6).unwrap();
        let minus_p = Analyzer::real(0.6, -0.8).unwrap();
        let amp = joint_amplitude(&partial(), &MeasurementSetting::new(minus(), minus_p));
        assert!((amp.re + 24.0 / (25.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!(amp.im.abs() < 1e-15);
        let t = probability_table(&partial(), &[plus(), minus()], &[plus_p, minus_p]).unwrap();
        let expected = [[0.5, 0.0], [49.0 / 1250.0, 576.0 / 1250.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t[i][j] - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_state_amplitude() {
        let s = TwoQubitState::new(1.0, 0.0, 1.0).unwrap();
        let w1 = Analyzer::normalized(Complex64::new(0.3, 0.2), Complex64::new(-0.1, 0.9)).unwrap();
        let w2 = Analyzer::normalized(Complex64::new(1.0, -1.0), Complex64::new(0.5, 0.0)).unwrap();
        let m = MeasurementSetting::new(w1, w2);
        assert!((joint_amplitude(&s, &m) - w1.h() * w2.v()).norm() < 1e-16);
    }

    #[test]
    fn schmidt_basis_table() {
        let s = TwoQubitState::new(0.28, 0.96, 0.7).unwrap();
        let hv = [
            Analyzer::real(1.0, 0.0).unwrap(),
            Analyzer::real(0.0, 1.0).unwrap(),
        ];
        let t = probability_table(&s, &hv, &hv).unwrap();
        assert_eq!(t[0][0], 0.0);
        assert_eq!(t[1][1], 0.0);
        assert!((t[0][1] - 0.28 * 0.28).abs() < 1e-15);
        assert!((t[1][0] - 0.96 * 0.96).abs() < 1e-15);
    }

    #[test]
    fn hardy_outcomes_forbidden() {
        let r = 337f64.sqrt();
        let chi = Analyzer::real(16.0 / r, -9.0 / r).unwrap();
        let plus_p = Analyzer::real(0.8, 0.6).unwrap();
        let phi = Analyzer::real(0.6, 0.8).unwrap();
        assert!(is_forbidden(
            &partial(),
            &MeasurementSetting::new(chi, plus_p),
            1e-24
        ));
        assert!(is_forbidden(
            &partial(),
            &MeasurementSetting::new(minus(), phi),
            1e-24
        ));
        assert!(!is_forbidden(
            &bell(),
            &MeasurementSetting::new(plus(), plus()),
            1e-24
        ));
    }

    #[test]
    fn validation() {
        assert!(TwoQubitState::new(0.6, 0.6, 0.0).is_err());
        assert!(TwoQubitState::new(-0.6, 0.8, 0.0).is_err());
        assert!(Analyzer::real(0.5, 0.5).is_err());
        assert!(Analyzer::normalized(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
        let bad = [plus(), plus()];
        assert!(probability_table(&bell(), &bad, &[plus(), minus()]).is_err());
        assert!(probability_table(&bell(), &[plus(), minus()], &bad).is_err());
    }

    fn analyzer() -> impl Strategy<Value = Analyzer> {
        proptest::array::uniform4(-1.0..1.0f64)
            .prop_filter("non-zero", |x| x.iter().map(|v| v * v).sum::<f64>() > 1e-3)
            .prop_map(|x| {
                Analyzer::normalized(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]))
                    .unwrap()
            })
    }

    fn state() -> impl Strategy<Value = TwoQubitState> {
        (0.0..std::f64::consts::FRAC_PI_2, 0.0..TAU)
            .prop_map(|(t, d)| TwoQubitState::from_angle(t, d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn tables_are_normalized(s in state(), w1 in analyzer(), w2 in analyzer()) {
            let t = probability_table(&s, &[w1, w1.orthogonal()], &[w2, w2.orthogonal()]).unwrap();
            let total: f64 = t.iter().flatten().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn forbidden_matches_amplitude_magnitude(s in state(), w1 in analyzer(), w2 in analyzer(), tol in 1e-8..1e-1f64) {
            let m = MeasurementSetting::new(w1, w2);
            let source = Complex64::from_polar(1.0, -s.delta());
            let direct = (s.a() * m.c() * m.g() + s.b() * source * m.d() * m.f()).norm();
            prop_assert_eq!(is_forbidden(&s, &m, tol), direct < tol.sqrt());
        }

        #[test]
        fn phase_plate_compensation(s in state(), w1 in analyzer(), w2 in analyzer(), phi in 0.0..TAU) {
            // advancing the source phase by phi is undone by d -> d e^{i phi}
            let m = MeasurementSetting::new(w1, w2);
            let turned = s.with_delta(s.delta() + phi).unwrap();
            let w1c = Analyzer::new(w1.h(), w1.v() * Complex64::from_polar(1.0, phi)).unwrap();
            let mc = MeasurementSetting::new(w1c, w2);
            prop_assert!((joint_amplitude(&turned, &mc).norm() - joint_amplitude(&s, &m).norm()).abs() < 1e-14);
        }
    }
}
