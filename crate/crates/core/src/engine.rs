//! Maximum classical gain compatible with a detected joint outcome.
//!
//! A detection of analyzer state `c|H> + d|V>` on photon #1 and
//! `f|H> + g|V>` on photon #2 pins the final fields to
//!
//! ```text
//! A1f = c u,   A3f' = d u,   A2f = g v,   A4f = f v
//! ```
//!
//! for free complex `u`, `v`. Because the amplifier is a bijection, searching
//! all seeds that produce the outcome is the same as searching all `(u, v)`.
//! The net gain `I_out - I_in` is a real quadratic form in
//! `w = (Re u, Im u, Re v, Im v)`, and `|w| = 1` is exactly unit output
//! intensity, so the best achievable gain per unit output is the top
//! eigenvalue of that form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::{inverse_amplify, FieldQuad, GainSchedule};
use crate::jacobi::{symmetric_eigen, Mat4};
use crate::quantum::{Analyzer, MeasurementSetting};
use crate::FORBIDDEN_LAMBDA_TOL;

/// Linear constraints `d A1f = c A3f'` and `f A2f = g A4f` on final fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeConstraint {
    c: Complex64,
    d: Complex64,
    f: Complex64,
    g: Complex64,
}

impl OutcomeConstraint {
    pub fn new(m: &MeasurementSetting) -> Self {
        Self {
            c: m.c(),
            d: m.d(),
            f: m.f(),
            g: m.g(),
        }
    }

    pub fn from_coefficients(
        c: Complex64,
        d: Complex64,
        f: Complex64,
        g: Complex64,
    ) -> Result<Self> {
        let m = MeasurementSetting::new(Analyzer::new(c, d)?, Analyzer::new(f, g)?);
        Ok(Self::new(&m))
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.c, self.d, self.f, self.g]
    }

    /// Every coefficient multiplied by `e^{i phase}`.
    pub fn with_common_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        Self {
            c: self.c * p,
            d: self.d * p,
            f: self.f * p,
            g: self.g * p,
        }
    }

    /// `(d A1f - c A3f', f A2f - g A4f)`; both vanish on admissible finals.
    pub fn residuals(&self, fin: &FieldQuad) -> (Complex64, Complex64) {
        (
            self.d * fin.a1() - self.c * fin.a3(),
            self.f * fin.a2() - self.g * fin.a4(),
        )
    }
}

/// Final fields satisfying `oc` for the free amplitudes `u` (photon #1) and
/// `v` (photon #2).
pub fn constrained_final(u: Complex64, v: Complex64, oc: &OutcomeConstraint) -> Result<FieldQuad> {
    FieldQuad::final_fields([oc.c * u, oc.g * v, oc.d * u, oc.f * v])
}

fn split(w: &[f64; 4]) -> (Complex64, Complex64) {
    (Complex64::new(w[0], w[1]), Complex64::new(w[2], w[3]))
}

/// `I_out - I_in` for the constrained final at `w`, evaluated by explicitly
/// inverting the amplifier.
pub fn net_gain(oc: &OutcomeConstraint, sched: &GainSchedule, w: &[f64; 4]) -> Result<f64> {
    let (u, v) = split(w);
    let fin = constrained_final(u, v, oc)?;
    let seed = inverse_amplify(&fin, sched)?;
    Ok(fin.intensity() - seed.intensity())
}

/// The symmetric matrix `M` with `w^T M w = I_out - I_in`, assembled from
/// [`net_gain`] by the polarization identity.
pub fn gain_form(oc: &OutcomeConstraint, sched: &GainSchedule) -> Result<Mat4> {
    let basis = |i: usize| {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        e
    };
    let mut m = [[0.0; 4]; 4];
    let mut diag = [0.0; 4];
    for (i, d) in diag.iter_mut().enumerate() {
        *d = net_gain(oc, sched, &basis(i))?;
        m[i][i] = *d;
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut e = basis(i);
            e[j] = 1.0;
            let off = 0.5 * (net_gain(oc, sched, &e)? - diag[i] - diag[j]);
            m[i][j] = off;
            m[j][i] = off;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ClassicallyForbidden,
    ClassicallyAllowed,
}

impl Verdict {
    pub fn from_lambda(lambda_max: f64, tol: f64) -> Self {
        if lambda_max <= tol {
            Verdict::ClassicallyForbidden
        } else {
            Verdict::ClassicallyAllowed
        }
    }

    pub fn is_forbidden(&self) -> bool {
        matches!(self, Verdict::ClassicallyForbidden)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ClassicallyForbidden => "classically-forbidden",
            Verdict::ClassicallyAllowed => "classically-allowed",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    /// Largest net gain per unit output intensity.
    pub lambda_max: f64,
    /// A maximizing final-field configuration with unit output intensity.
    pub optimizer: FieldQuad,
    /// The seed that amplifies into `optimizer`.
    pub seed: FieldQuad,
    pub i_in: f64,
    pub i_out: f64,
    pub verdict: Verdict,
}

pub fn max_gain(oc: &OutcomeConstraint, sched: &GainSchedule) -> Result<GainReport> {
    max_gain_with_tol(oc, sched, FORBIDDEN_LAMBDA_TOL)
}

/// Like [`max_gain`], with an explicit forbidden-verdict tolerance.
pub fn max_gain_with_tol(
    oc: &OutcomeConstraint,
    sched: &GainSchedule,
    tol: f64,
) -> Result<GainReport> {
    let m = gain_form(oc, sched)?;
    let eig = symmetric_eigen(&m)?;
    let lambda_max = eig.values[0];
    let (u, v) = split(&eig.vectors[0]);
    let optimizer = constrained_final(u, v, oc)?;
    let seed = inverse_amplify(&optimizer, sched)?;
    Ok(GainReport {
        lambda_max,
        i_in: seed.intensity(),
        i_out: optimizer.intensity(),
        optimizer,
        seed,
        verdict: Verdict::from_lambda(lambda_max, tol),
    })
}

/// Brute-force lower bound on `lambda_max`: the best [`net_gain`] over `n`
/// uniformly random unit vectors. Never touches [`gain_form`].
pub fn sample_gain(
    oc: &OutcomeConstraint,
    sched: &GainSchedule,
    n: usize,
    rng_seed: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(domain("sample count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut best = f64::NEG_INFINITY;
    let mut drawn = 0;
    while drawn < n {
        let w: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let w = w.map(|x| x / norm);
        best = best.max(net_gain(oc, sched, &w)?);
        drawn += 1;
    }
    Ok(best)
}

/// Least-squares fit of `log |lambda_max|` against `log eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
    pub excluded: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Scaling exponent of `lambda_max` under gains `(a eps, b eps)` (no source
/// phase plate). Grid points where `lambda_max` is exactly zero are dropped
/// with a warning.
pub fn epsilon_slope(oc: &OutcomeConstraint, a: f64, b: f64, eps_grid: &[f64]) -> Result<SlopeFit> {
    if eps_grid.len() < 4 {
        return Err(domain("epsilon grid needs at least 4 points"));
    }
    if eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(domain("epsilon grid must be finite and positive"));
    }
    let lo = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eps_grid.iter().copied().fold(0.0, f64::max);
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(domain("epsilon grid must span at least two decades"));
    }

    let mut xs = Vec::with_capacity(eps_grid.len());
    let mut ys = Vec::with_capacity(eps_grid.len());
    let mut excluded = Vec::new();
    let mut warnings = Vec::new();
    for &eps in eps_grid {
        let sched = GainSchedule::schmidt(a, b, eps, 0.0)?;
        let lambda = max_gain(oc, &sched)?.lambda_max;
        if lambda == 0.0 {
            excluded.push(eps);
            warnings.push(format!(
                "lambda_max is exactly 0 at eps = {eps:e}; point excluded"
            ));
            continue;
        }
        xs.push(eps.ln());
        ys.push(lambda.abs().ln());
    }
    if xs.len() < 2 {
        return Err(Error::Numeric("fewer than two usable grid points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        points_used: xs.len(),
        excluded,
        warnings,
    })
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}
