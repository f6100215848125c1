//! Full three-wave mixing with pump depletion, integrated by fixed-step RK4.
//!
//! ```text
//! dE0/dt = i gamma w0 E1 E2
//! dE1/dt = i gamma w1 E0 E2*
//! dE2/dt = i gamma w2 E0 E1*
//! ```
//!
//! Substituting `A = E / sqrt(w)` with a constant real pump gives the
//! two-mode amplifier of [`crate::field`] with `alpha = gamma sqrt(w1 w2) E0`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::format::fmt_f64;

/// Envelopes of pump (0) and signal/idler (1, 2) with their frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeWaveState {
    fields: [Complex64; 3],
    omega: [f64; 3],
    gamma: f64,
}

impl ThreeWaveState {
    /// Initial condition with a real, non-negative pump amplitude. The pump
    /// frequency is fixed to `w1 + w2`.
    pub fn initial(
        pump: f64,
        e1: Complex64,
        e2: Complex64,
        w1: f64,
        w2: f64,
        gamma: f64,
    ) -> Result<Self> {
        if !(pump.is_finite() && pump >= 0.0) {
            return Err(domain(
                "pump amplitude must be real, finite and non-negative",
            ));
        }
        Self::with_fields([Complex64::new(pump, 0.0), e1, e2], w1, w2, gamma)
    }

    /// Arbitrary complex envelopes; the pump frequency is fixed to `w1 + w2`.
    pub fn with_fields(fields: [Complex64; 3], w1: f64, w2: f64, gamma: f64) -> Result<Self> {
        if fields.iter().any(|e| !e.is_finite()) {
            return Err(domain("field envelopes must be finite"));
        }
        if !(w1.is_finite() && w2.is_finite() && w1 > 0.0 && w2 > 0.0) {
            return Err(domain("frequencies must be finite and positive"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(domain("coupling gamma must be finite and positive"));
        }
        Ok(Self {
            fields,
            omega: [w1 + w2, w1, w2],
            gamma,
        })
    }

    pub fn fields(&self) -> [Complex64; 3] {
        self.fields
    }

    pub fn omega(&self) -> [f64; 3] {
        self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Same frequencies and coupling, new envelopes.
    pub fn with_envelopes(&self, fields: [Complex64; 3]) -> Result<Self> {
        Self::with_fields(fields, self.omega[1], self.omega[2], self.gamma)
    }

    /// Complex-conjugated envelopes; integrating this state forward retraces
    /// the original trajectory backwards.
    pub fn conjugated(&self) -> Self {
        Self {
            fields: self.fields.map(|e| e.conj()),
            ..*self
        }
    }

    /// Scaled amplitudes `E1 / sqrt(w1)`, `E2 / sqrt(w2)`.
    pub fn scaled_signal(&self) -> (Complex64, Complex64) {
        (
            self.fields[1] / self.omega[1].sqrt(),
            self.fields[2] / self.omega[2].sqrt(),
        )
    }

    /// `|E1|^2/w1 - |E2|^2/w2`, `|E0|^2/w0 + |E1|^2/w1`, `|E0|^2/w0 + |E2|^2/w2`.
    pub fn manley_rowe(&self) -> [f64; 3] {
        let n = |k: usize| self.fields[k].norm_sqr() / self.omega[k];
        [n(1) - n(2), n(0) + n(1), n(0) + n(2)]
    }

    fn derivative(&self, e: &[Complex64; 3]) -> [Complex64; 3] {
        let ig = Complex64::new(0.0, self.gamma);
        [
            ig * self.omega[0] * e[1] * e[2],
            ig * self.omega[1] * e[0] * e[2].conj(),
            ig * self.omega[2] * e[0] * e[1].conj(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub max_steps: usize,
    /// Record every `stride`-th step (the endpoint is always recorded).
    pub stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            max_steps: 10_000_000,
            stride: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<ThreeWaveState>,
    steps: usize,
    dt: f64,
    stride: usize,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ThreeWaveState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&ThreeWaveState> {
        self.states.last()
    }

    /// Number of RK4 steps actually taken.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Step size actually used (`t_end / steps`).
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    /// CSV with columns `t,re_e0,im_e0,re_e1,im_e1,re_e2,im_e2,mr_diff12,mr_sum01,mr_sum02`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("t,re_e0,im_e0,re_e1,im_e1,re_e2,im_e2,mr_diff12,mr_sum01,mr_sum02\n");
        for (t, s) in self.times.iter().zip(&self.states) {
            let [e0, e1, e2] = s.fields;
            let mr = s.manley_rowe();
            let cols = [
                *t, e0.re, e0.im, e1.re, e1.im, e2.re, e2.im, mr[0], mr[1], mr[2],
            ];
            let line: Vec<String> = cols.iter().map(|v| fmt_f64(*v)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

fn rk4_step(state: &ThreeWaveState, h: f64) -> [Complex64; 3] {
    let y = state.fields;
    let add = |a: &[Complex64; 3], k: &[Complex64; 3], s: f64| -> [Complex64; 3] {
        [a[0] + k[0] * s, a[1] + k[1] * s, a[2] + k[2] * s]
    };
    let k1 = state.derivative(&y);
    let k2 = state.derivative(&add(&y, &k1, 0.5 * h));
    let k3 = state.derivative(&add(&y, &k2, 0.5 * h));
    let k4 = state.derivative(&add(&y, &k3, h));
    let mut next = y;
    for i in 0..3 {
        next[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
    }
    next
}

/// Integrates with the default [`IntegratorConfig`].
pub fn integrate(init: &ThreeWaveState, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_with(init, t_end, dt, &IntegratorConfig::default())
}

/// Fixed-step RK4 from `t = 0` to `t_end`. The step count is
/// `ceil(t_end / dt)` and the step is shrunk so the last step lands exactly
/// on `t_end`.
pub fn integrate_with(
    init: &ThreeWaveState,
    t_end: f64,
    dt: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(domain("t_end must be finite and positive"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(domain("dt must be finite and positive"));
    }
    if cfg.stride == 0 {
        return Err(domain("snapshot stride must be at least 1"));
    }
    let ratio = t_end / dt;
    // tolerate t_end/dt landing a hair above an integer
    let steps = (ratio - 1e-9 * ratio.max(1.0)).ceil().max(1.0);
    if steps > cfg.max_steps as f64 {
        return Err(Error::Resource(format!(
            "{steps} steps requested, limit is {}",
            cfg.max_steps
        )));
    }
    let steps = steps as usize;
    let h = t_end / steps as f64;

    let capacity = steps / cfg.stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut states = Vec::with_capacity(capacity);
    times.push(0.0);
    states.push(*init);

    let mut current = *init;
    for n in 1..=steps {
        let next = rk4_step(&current, h);
        if next.iter().any(|e| !e.is_finite()) {
            return Err(Error::Numeric(format!("integration diverged at step {n}")));
        }
        current.fields = next;
        if n % cfg.stride == 0 || n == steps {
            times.push(if n == steps { t_end } else { n as f64 * h });
            states.push(current);
        }
    }

    Ok(Trajectory {
        times,
        states,
        steps,
        dt: h,
        stride: cfg.stride,
    })
}

/// Worst drift of each Manley-Rowe quantity along the trajectory, relative
/// to its initial value (absolute when the initial value is zero).
pub fn manley_rowe_residual(traj: &Trajectory) -> Result<[f64; 3]> {
    let first = traj
        .states
        .first()
        .ok_or_else(|| domain("empty trajectory"))?
        .manley_rowe();
    let mut worst = [0.0f64; 3];
    for s in &traj.states {
        let q = s.manley_rowe();
        for k in 0..3 {
            let drift = (q[k] - first[k]).abs();
            let drift = if first[k] != 0.0 {
                drift / first[k].abs()
            } else {
                drift
            };
            worst[k] = worst[k].max(drift);
        }
    }
    Ok(worst)
}

/// Gain exponent of the undepleted-pump limit, `gamma sqrt(w1 w2) |E0| t`.
pub fn effective_gain(state: &ThreeWaveState, t: f64) -> f64 {
    state.gamma * (state.omega[1] * state.omega[2]).sqrt() * state.fields[0].norm() * t
}
