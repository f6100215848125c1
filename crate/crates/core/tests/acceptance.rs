//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion reports exactly one PASS/FAIL line; exits non-zero on failure.

use std::process::ExitCode;
use std::time::Instant;

use jorca_core::dynamics::{effective_gain, integrate, manley_rowe_residual, ThreeWaveState};
use jorca_core::engine::{
    constrained_final, epsilon_slope, log_grid, max_gain, sample_gain, OutcomeConstraint,
};
use jorca_core::exact::Rational;
use jorca_core::field::{forward_amplify, inverse_amplify, FieldQuad, GainSchedule};
use jorca_core::quantum::joint_probability;
use jorca_core::scenario::{
    builtin, evaluate_case, exact_probabilities, random_scan, GainRecipe, ScanCase, Tolerances,
};
use jorca_core::{Complex64, FORBIDDEN_LAMBDA_TOL, QUANTUM_ZERO_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oc_of(scenario: &str, label: &str) -> OutcomeConstraint {
    let s = builtin(scenario).unwrap();
    OutcomeConstraint::new(
        &s.outcomes
            .iter()
            .find(|o| o.label == label)
            .unwrap()
            .setting(),
    )
}

fn worked_example_table() -> Outcome {
    let s = builtin("partial-3-4-5").map_err(|e| e.to_string())?;
    let want = [
        Rational::new(1, 2),
        Rational::new(0, 1),
        Rational::new(49, 1250),
        Rational::new(576, 1250),
    ];
    let exact = exact_probabilities(&s).map_err(|e| e.to_string())?;
    ensure(exact == want, || format!("exact table {exact:?}"))?;
    let mut worst = 0.0f64;
    for (o, w) in s.outcomes.iter().zip(want) {
        let p = joint_probability(&s.state, &o.setting());
        worst = worst.max((p - *w.numer() as f64 / *w.denom() as f64).abs());
    }
    ensure(worst < 1e-12, || format!("float path error {worst:e}"))?;
    Ok(format!("exact match, float error {worst:.1e}"))
}

fn bell_forbidden_gain() -> Outcome {
    let oc = oc_of("max-entangled-diagonal", "+-");
    let mut worst = 0.0f64;
    for at in [0.01, 0.1, 1.0] {
        let sched = GainSchedule::uniform(at).map_err(|e| e.to_string())?;
        let lambda = max_gain(&oc, &sched).map_err(|e| e.to_string())?.lambda_max;
        let want = 1.0 - (2.0 * at).cosh();
        ensure(lambda <= 0.0, || {
            format!("alphaT={at}: lambda {lambda} > 0")
        })?;
        worst = worst.max((lambda - want).abs());
    }
    ensure(worst < 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:.1e}"))
}

fn hardy_triple() -> Outcome {
    let s = builtin("hardy").map_err(|e| e.to_string())?;
    let (mut max_p, mut max_l) = (0.0f64, f64::NEG_INFINITY);
    for o in &s.outcomes {
        let p = joint_probability(&s.state, &o.setting());
        ensure(p < QUANTUM_ZERO_TOL, || format!("{}: prob {p:e}", o.label))?;
        max_p = max_p.max(p);
        for eps in [1e-3, 1e-2, 1e-1, 1.0] {
            let sched = s.recipe.schedule(eps).map_err(|e| e.to_string())?;
            let l = max_gain(&OutcomeConstraint::new(&o.setting()), &sched)
                .map_err(|e| e.to_string())?
                .lambda_max;
            ensure(l <= FORBIDDEN_LAMBDA_TOL, || {
                format!("{} eps={eps}: lambda {l:e}", o.label)
            })?;
            max_l = max_l.max(l);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for label in ["+-'", "chi+'"] {
        let oc = oc_of("hardy", label);
        for _ in 0..100 {
            let u = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let q = constrained_final(u, v, &oc).map_err(|e| e.to_string())?;
            worst = worst.max((q.a3() * q.a4() / (q.a1() * q.a2()) + 0.75).norm());
        }
    }
    ensure(worst < 1e-12, || format!("ratio error {worst:e}"))?;
    Ok(format!(
        "max prob {max_p:.1e}, max lambda {max_l:.2e}, ratio error {worst:.1e}"
    ))
}

fn random_correspondence() -> Outcome {
    let res = random_scan(1000, 1e-3, 2024).map_err(|e| e.to_string())?;
    let sm = &res.summary;
    ensure(sm.forced_zero >= 100, || {
        format!("only {} forced zeros", sm.forced_zero)
    })?;
    ensure(sm.disagreements == 0, || {
        format!("{} disagreements", sm.disagreements)
    })?;
    for r in &res.rows {
        ensure(
            r.quantum_forbidden == (r.lambda_max <= FORBIDDEN_LAMBDA_TOL),
            || {
                format!(
                    "row {}: prob {:e}, lambda {:e}",
                    r.index, r.prob, r.lambda_max
                )
            },
        )?;
        ensure(r.prob <= 1e-6 || r.lambda_max > 0.0, || {
            format!("row {}: allowed but lambda {:e}", r.index, r.lambda_max)
        })?;
    }
    Ok(format!(
        "{}/{} agree, {} forced zeros, {} indeterminate",
        sm.agreements, sm.n, sm.forced_zero, sm.indeterminate
    ))
}

fn epsilon_scaling() -> Outcome {
    let grid = log_grid(1e-4, 1e-1, 13);
    let fit = |label| {
        epsilon_slope(&oc_of("partial-3-4-5", label), 0.6, 0.8, &grid).map_err(|e| e.to_string())
    };
    let forbidden = fit("+-'")?;
    let allowed = fit("--'")?;
    ensure((forbidden.slope - 2.0).abs() <= 0.05, || {
        format!("forbidden slope {}", forbidden.slope)
    })?;
    ensure((allowed.slope - 1.0).abs() <= 0.05, || {
        format!("allowed slope {}", allowed.slope)
    })?;
    Ok(format!(
        "slopes {:.4} (forbidden), {:.4} (allowed)",
        forbidden.slope, allowed.slope
    ))
}

fn roundtrip_and_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut rt = 0.0f64;
    for _ in 0..1000 {
        let modes = std::array::from_fn(|_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let seed = FieldQuad::seed(modes).map_err(|e| e.to_string())?;
        let sched = GainSchedule::new(
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..2.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
        .map_err(|e| e.to_string())?;
        let back = inverse_amplify(
            &forward_amplify(&seed, &sched).map_err(|e| e.to_string())?,
            &sched,
        )
        .map_err(|e| e.to_string())?;
        for (a, b) in back.modes().iter().zip(seed.modes().iter()) {
            rt = rt.max((a - b).norm());
        }
    }
    ensure(rt < 1e-12, || format!("roundtrip error {rt:e}"))?;

    let depleted = ThreeWaveState::initial(
        1.0,
        Complex64::new(0.8, 0.0),
        Complex64::new(0.0, 0.5),
        1.0,
        2.0,
        1.0,
    )
    .map_err(|e| e.to_string())?;
    let traj = integrate(&depleted, 2.0, 2.0 / 10_000.0).map_err(|e| e.to_string())?;
    ensure(traj.steps() == 10_000, || format!("{} steps", traj.steps()))?;
    let mr = manley_rowe_residual(&traj).map_err(|e| e.to_string())?;
    let mr_max = mr.iter().cloned().fold(0.0, f64::max);
    ensure(mr_max < 1e-9, || format!("Manley-Rowe residuals {mr:?}"))?;

    let mut und = 0.0f64;
    for _ in 0..20 {
        let (w1, w2) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let seed_scale = 10.0 * 1e-3 / 2f64.sqrt();
        let e1 =
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * seed_scale;
        let e2 =
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * seed_scale;
        let init =
            ThreeWaveState::initial(10.0, e1, e2, w1, w2, 0.05).map_err(|e| e.to_string())?;
        let t_end = rng.random_range(0.1..1.5) / effective_gain(&init, 1.0);
        let traj = integrate(&init, t_end, t_end / 2000.0).map_err(|e| e.to_string())?;
        let (a1, a2) = traj.last().unwrap().scaled_signal();
        let (s1, s2) = init.scaled_signal();
        let zero = Complex64::new(0.0, 0.0);
        let sched =
            GainSchedule::new(effective_gain(&init, t_end), 0.0, 0.0).map_err(|e| e.to_string())?;
        let closed = forward_amplify(
            &FieldQuad::seed([s1, s2, zero, zero]).map_err(|e| e.to_string())?,
            &sched,
        )
        .map_err(|e| e.to_string())?;
        let scale = closed.a1().norm().max(closed.a2().norm());
        und = und.max((a1 - closed.a1()).norm().max((a2 - closed.a2()).norm()) / scale);
    }
    ensure(und < 1e-4, || format!("undepleted relative error {und:e}"))?;
    Ok(format!(
        "roundtrip {rt:.1e}, Manley-Rowe {mr_max:.1e}, undepleted {und:.1e}"
    ))
}

fn oracle_bound() -> Outcome {
    let tol = Tolerances::default();
    let results: Vec<Result<(f64, f64, bool), String>> = (0..100usize)
        .into_par_iter()
        .map(|i| {
            let case = ScanCase::generate(7, i, i % 5 == 0, i % 2 == 1);
            let sched = GainRecipe::for_state(&case.state)
                .schedule(0.1)
                .map_err(|e| e.to_string())?;
            let oc = OutcomeConstraint::new(&case.setting);
            let lambda = max_gain(&oc, &sched).map_err(|e| e.to_string())?.lambda_max;
            let sampled =
                sample_gain(&oc, &sched, 100_000, 1000 + i as u64).map_err(|e| e.to_string())?;
            let allowed = joint_probability(&case.state, &case.setting) > tol.allowed_prob;
            Ok((lambda, sampled, allowed))
        })
        .collect();
    let (mut excess, mut worst_ratio, mut n_allowed) = (f64::NEG_INFINITY, f64::INFINITY, 0);
    for r in results {
        let (lambda, sampled, allowed) = r?;
        excess = excess.max(sampled - lambda);
        if allowed {
            n_allowed += 1;
            worst_ratio = worst_ratio.min(sampled / lambda);
        }
    }
    ensure(excess <= 1e-10, || {
        format!("sample exceeds lambda by {excess:e}")
    })?;
    ensure(n_allowed > 0, || "no allowed cases drawn".into())?;
    ensure(worst_ratio >= 0.95, || {
        format!("worst sampled/lambda on allowed outcomes {worst_ratio}")
    })?;
    Ok(format!(
        "max excess {excess:.1e}, worst ratio {worst_ratio:.4} over {n_allowed} allowed cases"
    ))
}

fn phase_plate_cancellation() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut forbidden = 0;
    for i in 0..100 {
        let base = ScanCase::generate(8, i, i % 3 == 0, false);
        let delta = rng.random_range(0.1..6.0);
        let shifted = base.compensated(delta).map_err(|e| e.to_string())?;
        ensure(shifted.state.delta() != 0.0, || {
            format!("case {i}: delta vanished")
        })?;
        let r0 = evaluate_case(&base, 1e-2, &tol).map_err(|e| e.to_string())?;
        let r1 = evaluate_case(&shifted, 1e-2, &tol).map_err(|e| e.to_string())?;
        ensure(
            r0.classical_forbidden == r1.classical_forbidden
                && r0.quantum_forbidden == r1.quantum_forbidden,
            || format!("case {i}: {r0:?} vs {r1:?}"),
        )?;
        forbidden += r0.classical_forbidden as usize;
    }
    Ok(format!("100/100 identical ({forbidden} forbidden)"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked-example probability table", worked_example_table),
        ("maximal-entanglement forbidden gain", bell_forbidden_gain),
        ("Hardy triple", hardy_triple),
        ("random correspondence", random_correspondence),
        ("epsilon scaling", epsilon_scaling),
        ("roundtrip and conservation", roundtrip_and_conservation),
        ("oracle bound", oracle_bound),
        ("phase-plate cancellation", phase_plate_cancellation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
