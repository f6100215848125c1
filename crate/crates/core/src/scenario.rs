//! Canned experiments, angle sweeps, and randomized correspondence scans.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{max_gain_with_tol, OutcomeConstraint, Verdict};
use crate::error::{Error, Result};
use crate::exact::{exact_probability, ExactAnalyzer, ExactState, Rational, Surd};
use crate::field::GainSchedule;
use crate::format::csv_table;
use crate::quantum::{joint_probability, Analyzer, MeasurementSetting, TwoQubitState};
use crate::{ALLOWED_PROB_MIN, FORBIDDEN_LAMBDA_TOL, QUANTUM_ZERO_TOL};

pub const BUILTIN_NAMES: [&str; 4] = [
    "max-entangled-diagonal",
    "partial-3-4-5",
    "hardy",
    "cascade-singlet",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `lambda_max` at or below this is a forbidden verdict.
    pub lambda: f64,
    /// Quantum probability below this counts as zero.
    pub quantum_zero: f64,
    /// Quantum probability above this must be classically allowed.
    pub allowed_prob: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            lambda: FORBIDDEN_LAMBDA_TOL,
            quantum_zero: QUANTUM_ZERO_TOL,
            allowed_prob: ALLOWED_PROB_MIN,
        }
    }
}

/// Output port of a polarizing beamsplitter rotated to angle `beta`:
/// `Pass` is `cos b |H> + sin b |V>`, `Reflect` is `sin b |H> - cos b |V>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    Pass,
    Reflect,
}

impl Port {
    pub fn analyzer(&self, beta: f64) -> Analyzer {
        match self {
            Port::Pass => Analyzer::linear(beta),
            Port::Reflect => Analyzer::linear(beta - FRAC_PI_2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wing {
    One,
    Two,
}

impl std::str::FromStr for Wing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Wing::One),
            "2" => Ok(Wing::Two),
            other => Err(Error::InvalidInput(format!(
                "wing must be 1 or 2, got `{other}`"
            ))),
        }
    }
}

/// One joint outcome of interest with its exact analyzers.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpec {
    pub label: String,
    pub wing1: ExactAnalyzer,
    pub port1: Port,
    pub wing2: ExactAnalyzer,
    pub port2: Port,
    pub expected_prob: Rational,
}

impl OutcomeSpec {
    pub fn expected_forbidden(&self) -> bool {
        self.expected_prob == Rational::from_integer(0)
    }

    pub fn setting(&self) -> MeasurementSetting {
        MeasurementSetting::new(self.wing1.to_analyzer(), self.wing2.to_analyzer())
    }
}

/// Gains `(a eps, b eps)` on the two pairs, source phase plate `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainRecipe {
    pub g12_per_eps: f64,
    pub g34_per_eps: f64,
    pub delta: f64,
}

impl GainRecipe {
    pub fn for_state(state: &TwoQubitState) -> Self {
        Self {
            g12_per_eps: state.a(),
            g34_per_eps: state.b(),
            delta: state.delta(),
        }
    }

    pub fn schedule(&self, eps: f64) -> Result<GainSchedule> {
        GainSchedule::new(self.g12_per_eps * eps, self.g34_per_eps * eps, self.delta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub exact_state: ExactState,
    pub state: TwoQubitState,
    pub outcomes: Vec<OutcomeSpec>,
    pub recipe: GainRecipe,
}

impl Scenario {
    fn assemble(name: &str, exact_state: ExactState, outcomes: Vec<OutcomeSpec>) -> Self {
        let state = exact_state.to_state();
        Self {
            name: name.to_string(),
            exact_state,
            state,
            outcomes,
            recipe: GainRecipe::for_state(&state),
        }
    }

    /// The first outcome expected to have zero probability.
    pub fn nominal_forbidden(&self) -> Option<&OutcomeSpec> {
        self.outcomes.iter().find(|o| o.expected_forbidden())
    }
}

struct Kit {
    plus: ExactAnalyzer,
    minus: ExactAnalyzer,
}

fn kit() -> Result<Kit> {
    let h = Surd::over_sqrt(1, 2)?;
    Ok(Kit {
        plus: ExactAnalyzer::new(h, h)?,
        minus: ExactAnalyzer::new(h, h.neg())?,
    })
}

fn outcome(
    label: &str,
    wing1: (ExactAnalyzer, Port),
    wing2: (ExactAnalyzer, Port),
    expected_prob: Rational,
) -> OutcomeSpec {
    OutcomeSpec {
        label: label.to_string(),
        wing1: wing1.0,
        port1: wing1.1,
        wing2: wing2.0,
        port2: wing2.1,
        expected_prob,
    }
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Looks up one of [`BUILTIN_NAMES`].
pub fn builtin(name: &str) -> Result<Scenario> {
    let k = kit()?;
    let half = Surd::over_sqrt(1, 2)?;
    let (plus, minus) = ((k.plus, Port::Pass), (k.minus, Port::Reflect));
    match name {
        "max-entangled-diagonal" => {
            let state = ExactState::new(half, half, false)?;
            Ok(Scenario::assemble(
                name,
                state,
                vec![
                    outcome("++", plus, plus, r(1, 2)),
                    outcome("+-", plus, minus, r(0, 1)),
                    outcome("-+", minus, plus, r(0, 1)),
                    outcome("--", minus, minus, r(1, 2)),
                ],
            ))
        }
        "partial-3-4-5" => {
            let state = ExactState::new(Surd::frac(3, 5), Surd::frac(4, 5), false)?;
            let plus_p = (
                ExactAnalyzer::new(Surd::frac(4, 5), Surd::frac(3, 5))?,
                Port::Pass,
            );
            let minus_p = (
                ExactAnalyzer::new(Surd::frac(3, 5), Surd::frac(-4, 5))?,
                Port::Reflect,
            );
            Ok(Scenario::assemble(
                name,
                state,
                vec![
                    outcome("++'", plus, plus_p, r(1, 2)),
                    outcome("+-'", plus, minus_p, r(0, 1)),
                    outcome("-+'", minus, plus_p, r(49, 1250)),
                    outcome("--'", minus, minus_p, r(576, 1250)),
                ],
            ))
        }
        "hardy" => {
            let state = ExactState::new(Surd::frac(3, 5), Surd::frac(4, 5), false)?;
            let plus_p = (
                ExactAnalyzer::new(Surd::frac(4, 5), Surd::frac(3, 5))?,
                Port::Pass,
            );
            let minus_p = (
                ExactAnalyzer::new(Surd::frac(3, 5), Surd::frac(-4, 5))?,
                Port::Reflect,
            );
            let chi = (
                ExactAnalyzer::new(Surd::over_sqrt(16, 337)?, Surd::over_sqrt(-9, 337)?)?,
                Port::Pass,
            );
            let phi = (
                ExactAnalyzer::new(Surd::frac(3, 5), Surd::frac(4, 5))?,
                Port::Pass,
            );
            Ok(Scenario::assemble(
                name,
                state,
                vec![
                    outcome("+-'", plus, minus_p, r(0, 1)),
                    outcome("chi+'", chi, plus_p, r(0, 1)),
                    outcome("-phi", minus, phi, r(0, 1)),
                ],
            ))
        }
        "cascade-singlet" => {
            let state = ExactState::new(half, half, true)?;
            Ok(Scenario::assemble(
                name,
                state,
                vec![
                    outcome("++", plus, plus, r(0, 1)),
                    outcome("+-", plus, minus, r(1, 2)),
                    outcome("-+", minus, plus, r(1, 2)),
                    outcome("--", minus, minus, r(0, 1)),
                ],
            ))
        }
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

/// Recomputes every stored probability of `s` in exact arithmetic.
pub fn exact_probabilities(s: &Scenario) -> Result<Vec<Rational>> {
    s.outcomes
        .iter()
        .map(|o| exact_probability(&s.exact_state, &o.wing1, &o.wing2))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub label: String,
    pub prob: f64,
    pub lambda_max: f64,
    pub verdict: Verdict,
    pub agree: bool,
}

/// Serializes as `{scenario, eps, outcomes: [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub scenario: String,
    pub eps: f64,
    pub outcomes: Vec<OutcomeRecord>,
}

impl VerificationRecord {
    pub fn pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.agree)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,prob,lambda_max,verdict,agree\n");
        for o in &self.outcomes {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                o.label,
                crate::format::fmt_f64(o.prob),
                crate::format::fmt_f64(o.lambda_max),
                o.verdict,
                o.agree
            ));
        }
        out
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidInput(format!(
            "eps must be finite and positive, got {eps}"
        )));
    }
    if eps == 0.0 {
        return Err(Error::InvalidInput(
            "eps = 0 means no pump: every lambda_max is 0 and the run is degenerate".into(),
        ));
    }
    Ok(())
}

pub fn run_scenario(s: &Scenario, eps: f64) -> Result<VerificationRecord> {
    run_scenario_with(s, eps, &Tolerances::default())
}

/// Quantum probability, `lambda_max`, and verdict agreement for every listed
/// outcome. An outcome agrees when the quantum zero test, the classical
/// verdict and the stored expectation all say the same thing.
pub fn run_scenario_with(s: &Scenario, eps: f64, tol: &Tolerances) -> Result<VerificationRecord> {
    check_eps(eps)?;
    let sched = s.recipe.schedule(eps)?;
    let outcomes = s
        .outcomes
        .iter()
        .map(|o| {
            let setting = o.setting();
            let prob = joint_probability(&s.state, &setting);
            let report = max_gain_with_tol(&OutcomeConstraint::new(&setting), &sched, tol.lambda)?;
            let quantum_zero = prob < tol.quantum_zero;
            let agree = quantum_zero == report.verdict.is_forbidden()
                && quantum_zero == o.expected_forbidden();
            Ok(OutcomeRecord {
                label: o.label.clone(),
                prob,
                lambda_max: report.lambda_max,
                verdict: report.verdict,
                agree,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationRecord {
        scenario: s.name.clone(),
        eps,
        outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub prob: f64,
    pub lambda_max: f64,
}

pub const SWEEP_CSV_HEADER: [&str; 3] = ["beta", "prob", "lambda_max"];

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv_table(
        &SWEEP_CSV_HEADER,
        rows.iter().map(|r| vec![r.beta, r.prob, r.lambda_max]),
    )
}

/// Rotates one wing's beamsplitter through `beta_grid` for the scenario's
/// nominally forbidden outcome, keeping the other wing fixed.
pub fn sweep_angle(s: &Scenario, wing: Wing, beta_grid: &[f64], eps: f64) -> Result<Vec<SweepRow>> {
    if beta_grid.is_empty() {
        return Err(Error::InvalidInput("beta grid is empty".into()));
    }
    if beta_grid.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidInput("beta grid must be finite".into()));
    }
    check_eps(eps)?;
    let target = s.nominal_forbidden().ok_or_else(|| {
        Error::InvalidInput(format!("scenario {} lists no forbidden outcome", s.name))
    })?;
    let base = target.setting();
    let sched = s.recipe.schedule(eps)?;
    beta_grid
        .par_iter()
        .map(|&beta| {
            let setting = match wing {
                Wing::One => MeasurementSetting::new(target.port1.analyzer(beta), base.wing2),
                Wing::Two => MeasurementSetting::new(base.wing1, target.port2.analyzer(beta)),
            };
            let report = max_gain_with_tol(
                &OutcomeConstraint::new(&setting),
                &sched,
                FORBIDDEN_LAMBDA_TOL,
            )?;
            Ok(SweepRow {
                beta,
                prob: joint_probability(&s.state, &setting),
                lambda_max: report.lambda_max,
            })
        })
        .collect()
}

/// Parses `start:stop:count` into `count` evenly spaced values including both
/// endpoints.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidInput(format!("grid `{spec}` is not start:stop:count"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(start.is_finite() && stop.is_finite()) || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                stop
            } else {
                start + (stop - start) * i as f64 / (count - 1) as f64
            }
        })
        .collect())
}

/// A random (state, setting) pair, reproducible from `(rng_seed, index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCase {
    pub index: usize,
    pub forced_zero: bool,
    pub state: TwoQubitState,
    pub setting: MeasurementSetting,
}

fn random_analyzer(rng: &mut ChaCha8Rng) -> Analyzer {
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        if let Ok(a) = Analyzer::normalized(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]))
        {
            return a;
        }
    }
}

const MIN_ZERO_DENOMINATOR: f64 = 1e-6;

impl ScanCase {
    /// Draws case `index`. Forced cases pick `a, b, c, d, g` at random and
    /// solve `a c g + b e^{-i delta} d f = 0` for `f` before renormalizing
    /// the second analyzer, so the quantum probability is zero up to
    /// rounding.
    pub fn generate(rng_seed: u64, index: usize, forced_zero: bool, random_delta: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_stream(index as u64);
        loop {
            let theta = rng.random_range(0.0..FRAC_PI_2);
            let delta = if random_delta {
                rng.random_range(0.0..TAU)
            } else {
                0.0
            };
            let state = TwoQubitState::from_angle(theta, delta)
                .expect("angle parameterization is normalized");
            let wing1 = random_analyzer(&mut rng);
            let wing2 = random_analyzer(&mut rng);
            if !forced_zero {
                return Self {
                    index,
                    forced_zero,
                    state,
                    setting: MeasurementSetting::new(wing1, wing2),
                };
            }
            let source = Complex64::from_polar(1.0, -state.delta());
            let denom = state.b() * source * wing1.v();
            if denom.norm() < MIN_ZERO_DENOMINATOR {
                continue;
            }
            let g = wing2.v();
            let f = -state.a() * wing1.h() * g / denom;
            let Ok(wing2) = Analyzer::normalized(f, g) else {
                continue;
            };
            return Self {
                index,
                forced_zero,
                state,
                setting: MeasurementSetting::new(wing1, wing2),
            };
        }
    }

    /// The same physics seen through an extra source phase plate `delta`,
    /// compensated by `d -> d e^{i delta}` on photon #1's analyzer.
    pub fn compensated(&self, delta: f64) -> Result<Self> {
        let state = self.state.with_delta(self.state.delta() + delta)?;
        let w1 = self.setting.wing1;
        let wing1 = Analyzer::new(w1.h(), w1.v() * Complex64::from_polar(1.0, delta))?;
        Ok(Self {
            state,
            setting: MeasurementSetting::new(wing1, self.setting.wing2),
            ..*self
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub index: usize,
    pub forced_zero: bool,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub prob: f64,
    pub lambda_max: f64,
    pub quantum_forbidden: bool,
    pub classical_forbidden: bool,
    /// Probability between the zero and allowed thresholds; neither side of
    /// the correspondence makes a claim about it.
    pub indeterminate: bool,
    pub agree: bool,
}

pub fn evaluate_case(case: &ScanCase, eps: f64, tol: &Tolerances) -> Result<ScanRow> {
    check_eps(eps)?;
    let sched = GainRecipe::for_state(&case.state).schedule(eps)?;
    let report = max_gain_with_tol(&OutcomeConstraint::new(&case.setting), &sched, tol.lambda)?;
    let prob = joint_probability(&case.state, &case.setting);
    let quantum_forbidden = prob < tol.quantum_zero;
    let classical_forbidden = report.verdict.is_forbidden();
    Ok(ScanRow {
        index: case.index,
        forced_zero: case.forced_zero,
        a: case.state.a(),
        b: case.state.b(),
        delta: case.state.delta(),
        prob,
        lambda_max: report.lambda_max,
        quantum_forbidden,
        classical_forbidden,
        indeterminate: !quantum_forbidden && prob <= tol.allowed_prob,
        agree: quantum_forbidden == classical_forbidden,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Every `forced_zero_every`-th case is an exact-zero construction.
    pub forced_zero_every: usize,
    pub random_delta: bool,
    pub tolerances: Tolerances,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            forced_zero_every: 5,
            random_delta: false,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub n: usize,
    pub eps: f64,
    pub rng_seed: u64,
    pub agreements: usize,
    pub disagreements: usize,
    pub quantum_forbidden: usize,
    pub forced_zero: usize,
    pub indeterminate: usize,
    /// Largest `lambda_max` over forced-zero cases.
    pub forced_zero_max_lambda: Option<f64>,
    /// Largest `lambda_max` over quantum-forbidden cases.
    pub forbidden_max_lambda: Option<f64>,
    /// Smallest `lambda_max` over cases with probability above the allowed
    /// threshold.
    pub allowed_min_lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub summary: ScanSummary,
    pub rows: Vec<ScanRow>,
}

pub const SCAN_CSV_HEADER: [&str; 11] = [
    "index",
    "forced_zero",
    "a",
    "b",
    "delta",
    "prob",
    "lambda_max",
    "quantum_forbidden",
    "classical_forbidden",
    "indeterminate",
    "agree",
];

impl ScanResult {
    /// Booleans are written as 0/1 so every column is numeric.
    pub fn to_csv(&self) -> String {
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        csv_table(
            &SCAN_CSV_HEADER,
            self.rows.iter().map(|r| {
                vec![
                    r.index as f64,
                    b(r.forced_zero),
                    r.a,
                    r.b,
                    r.delta,
                    r.prob,
                    r.lambda_max,
                    b(r.quantum_forbidden),
                    b(r.classical_forbidden),
                    b(r.indeterminate),
                    b(r.agree),
                ]
            }),
        )
    }
}

pub fn random_scan(n: usize, eps: f64, rng_seed: u64) -> Result<ScanResult> {
    random_scan_with(n, eps, rng_seed, &ScanOptions::default())
}

/// Evaluates `n` random cases in parallel. Each case draws from its own RNG
/// stream keyed by its index, so results do not depend on thread count.
pub fn random_scan_with(
    n: usize,
    eps: f64,
    rng_seed: u64,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    if n == 0 {
        return Err(Error::InvalidInput("scan needs at least one case".into()));
    }
    if opts.forced_zero_every == 0 {
        return Err(Error::InvalidInput(
            "forced_zero_every must be at least 1".into(),
        ));
    }
    check_eps(eps)?;
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let case = ScanCase::generate(
                rng_seed,
                i,
                i % opts.forced_zero_every == 0,
                opts.random_delta,
            );
            evaluate_case(&case, eps, &opts.tolerances)
        })
        .collect::<Result<Vec<_>>>()?;

    let max_of = |it: &mut dyn Iterator<Item = f64>| {
        it.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
    };
    let min_of = |it: &mut dyn Iterator<Item = f64>| {
        it.fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))))
    };
    let agreements = rows.iter().filter(|r| r.agree).count();
    let summary = ScanSummary {
        n,
        eps,
        rng_seed,
        agreements,
        disagreements: n - agreements,
        quantum_forbidden: rows.iter().filter(|r| r.quantum_forbidden).count(),
        forced_zero: rows.iter().filter(|r| r.forced_zero).count(),
        indeterminate: rows.iter().filter(|r| r.indeterminate).count(),
        forced_zero_max_lambda: max_of(
            &mut rows.iter().filter(|r| r.forced_zero).map(|r| r.lambda_max),
        ),
        forbidden_max_lambda: max_of(
            &mut rows
                .iter()
                .filter(|r| r.quantum_forbidden)
                .map(|r| r.lambda_max),
        ),
        allowed_min_lambda: min_of(
            &mut rows
                .iter()
                .filter(|r| r.prob > opts.tolerances.allowed_prob)
                .map(|r| r.lambda_max),
        ),
    };
    Ok(ScanResult { summary, rows })
}

/// The diagonal-basis beamsplitter angle.
pub const DIAGONAL_BETA: f64 = FRAC_PI_4;
