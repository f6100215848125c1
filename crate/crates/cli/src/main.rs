//! `jorca` — verify photon-pair anti-correlations against the classical
//! seeded-amplifier model.
//!
//! Exit status: 0 when every verdict agrees, 1 on any disagreement, 2 on
//! usage or validation errors.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jorca_core::dynamics::{
    integrate_with, manley_rowe_residual, IntegratorConfig, ThreeWaveState,
};
use jorca_core::format::fmt_f64;
use jorca_core::scenario::{
    builtin, parse_grid, random_scan_with, run_scenario_with, sweep_angle, sweep_csv, ScanOptions,
    Tolerances, VerificationRecord, Wing, BUILTIN_NAMES,
};
use jorca_core::Complex64;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "jorca",
    version,
    about = "Classical seeded-amplifier checks of photon-pair anti-correlations"
)]
#[command(
    after_help = "Any flag may also be preset in a `key = value` file passed as --config FILE; \
command-line flags override the file. JORCA_THREADS caps the worker thread count."
)]
pub struct Cli {
    /// Preset flags from a `key = value` file.
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check every outcome of a builtin scenario; one line per outcome.
    #[command(after_help = "CSV columns: label,prob,lambda_max,verdict,agree\n\
JSON: {scenario, eps, outcomes: [{label, prob, lambda_max, verdict, agree}]}\n\
The table is written only with --output; the summary lines always go to stdout.")]
    Verify(VerifyArgs),
    /// Rotate one wing's beamsplitter across a grid for the forbidden outcome.
    #[command(after_help = "CSV columns: beta,prob,lambda_max (beta in radians)")]
    Sweep(SweepArgs),
    /// Random (state, setting) pairs, a fixed share forced to exact zeros.
    #[command(
        after_help = "CSV columns: index,forced_zero,a,b,delta,prob,lambda_max,\
quantum_forbidden,classical_forbidden,indeterminate,agree (flags as 0/1)\n\
JSON: {summary: {...}, rows: [...]}"
    )]
    Scan(ScanArgs),
    /// Integrate the three-wave equations with fixed-step RK4.
    #[command(
        after_help = "CSV columns: t,re_e0,im_e0,re_e1,im_e1,re_e2,im_e2,mr_diff12,mr_sum01,mr_sum02\n\
mr_* are the Manley-Rowe quantities |E1|^2/w1-|E2|^2/w2, |E0|^2/w0+|E1|^2/w1, |E0|^2/w0+|E2|^2/w2."
    )]
    Ode(OdeArgs),
    /// Verify every builtin scenario at several gain scales.
    #[command(
        after_help = "CSV columns: scenario,eps,label,prob,lambda_max,verdict,agree\n\
JSON: [{scenario, eps, outcomes: [...]}, ...]"
    )]
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write the table here (atomically) instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TolArgs {
    /// lambda_max at or below this is a forbidden verdict.
    #[arg(long, default_value_t = jorca_core::FORBIDDEN_LAMBDA_TOL)]
    lambda_tol: f64,
    /// Quantum probabilities below this count as zero.
    #[arg(long, default_value_t = jorca_core::QUANTUM_ZERO_TOL)]
    zero_tol: f64,
    /// Quantum probabilities above this must be classically allowed.
    #[arg(long, default_value_t = jorca_core::ALLOWED_PROB_MIN)]
    allowed_prob: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances> {
        if !(self.lambda_tol.is_finite() && self.lambda_tol >= 0.0) {
            bail!("--lambda-tol must be finite and non-negative");
        }
        for (name, v) in [
            ("--zero-tol", self.zero_tol),
            ("--allowed-prob", self.allowed_prob),
        ] {
            if !(v.is_finite() && v > 0.0) {
                bail!("{name} must be finite and positive");
            }
        }
        if self.zero_tol > self.allowed_prob {
            bail!("--zero-tol must not exceed --allowed-prob");
        }
        Ok(Tolerances {
            lambda: self.lambda_tol,
            quantum_zero: self.zero_tol,
            allowed_prob: self.allowed_prob,
        })
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct VerifyArgs {
    /// One of: max-entangled-diagonal, partial-3-4-5, hardy, cascade-singlet.
    #[arg(long)]
    scenario: String,
    /// Gain scale: the pair gains are (a eps, b eps).
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct SweepArgs {
    #[arg(long)]
    scenario: String,
    /// Which wing's beamsplitter rotates (1 or 2).
    #[arg(long, default_value = "2")]
    wing: String,
    /// Angle grid `start:stop:count`, both endpoints included.
    #[arg(long, default_value = "0:1.5707963267948966:91")]
    beta: String,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ScanArgs {
    /// Number of random cases.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 0.001)]
    eps: f64,
    #[arg(long, default_value_t = 42)]
    rng_seed: u64,
    /// Every k-th case is constructed to have zero probability.
    #[arg(long, default_value_t = 5)]
    forced_zero_every: usize,
    /// Draw a random source phase for each state.
    #[arg(long)]
    random_delta: bool,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct OdeArgs {
    /// Real pump amplitude E0 at t = 0.
    #[arg(long, default_value_t = 1.0)]
    pump: f64,
    /// Signal amplitude E1 as `re,im`.
    #[arg(long, default_value = "0.8,0", value_parser = parse_complex)]
    signal: Complex64,
    /// Idler amplitude E2 as `re,im`.
    #[arg(long, default_value = "0,0.5", value_parser = parse_complex)]
    idler: Complex64,
    #[arg(long, default_value_t = 1.0)]
    w1: f64,
    #[arg(long, default_value_t = 2.0)]
    w2: f64,
    /// Coupling constant.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    t_end: f64,
    #[arg(long, default_value_t = 2e-4)]
    dt: f64,
    /// Record every k-th step.
    #[arg(long, default_value_t = 100)]
    stride: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ReportArgs {
    /// Comma-separated gain scales.
    #[arg(long, default_value = "0.001,0.01,0.1")]
    eps_list: String,
    #[command(flatten)]
    tol: TolArgs,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `re,im`, got `{s}`"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Complex64::new(re, im))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        bail!("{name} must be finite and positive, got {v}");
    }
    Ok(())
}

/// Writes via a temp file in the destination directory, then renames.
fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: &OutputArgs, body: &str) -> Result<()> {
    match &out.output {
        Some(p) => write_atomic(p, body),
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn summary_line(rec: &VerificationRecord) -> Vec<String> {
    rec.outcomes
        .iter()
        .map(|o| {
            format!(
                "{:<18} {:<8} prob={:<12.6e} lambda_max={:<13.6e} {:<20} {}",
                rec.scenario,
                o.label,
                o.prob,
                o.lambda_max,
                o.verdict,
                if o.agree { "agree" } else { "DISAGREE" }
            )
        })
        .collect()
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    positive("--eps", a.eps)?;
    let tol = a.tol.tolerances()?;
    let rec = run_scenario_with(&builtin(&a.scenario)?, a.eps, &tol)?;
    for line in summary_line(&rec) {
        println!("{line}");
    }
    if let Some(p) = &a.out.output {
        let body = match a.out.format {
            Format::Csv => rec.to_csv(),
            Format::Json => to_json(&rec)?,
        };
        write_atomic(p, &body)?;
    }
    Ok(rec.pass())
}

fn sweep(a: &SweepArgs) -> Result<bool> {
    positive("--eps", a.eps)?;
    let wing: Wing = a.wing.parse()?;
    let grid = parse_grid(&a.beta)?;
    let rows = sweep_angle(&builtin(&a.scenario)?, wing, &grid, a.eps)?;
    let body = match a.out.format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => {
            to_json(&json!({ "scenario": a.scenario, "wing": a.wing, "eps": a.eps, "rows": rows }))?
        }
    };
    emit(&a.out, &body)?;
    eprintln!("sweep {} wing {}: {} rows", a.scenario, a.wing, rows.len());
    Ok(true)
}

fn scan(a: &ScanArgs) -> Result<bool> {
    positive("--eps", a.eps)?;
    let opts = ScanOptions {
        forced_zero_every: a.forced_zero_every,
        random_delta: a.random_delta,
        tolerances: a.tol.tolerances()?,
    };
    let res = random_scan_with(a.n, a.eps, a.rng_seed, &opts)?;
    let body = match a.out.format {
        Format::Csv => res.to_csv(),
        Format::Json => to_json(&res)?,
    };
    emit(&a.out, &body)?;
    let s = &res.summary;
    eprintln!(
        "scan n={} eps={} seed={}: {} agree, {} disagree, {} forced zeros, {} indeterminate",
        s.n, s.eps, s.rng_seed, s.agreements, s.disagreements, s.forced_zero, s.indeterminate
    );
    Ok(s.disagreements == 0)
}

fn ode(a: &OdeArgs) -> Result<bool> {
    positive("--t-end", a.t_end)?;
    positive("--dt", a.dt)?;
    if a.stride == 0 {
        bail!("--stride must be at least 1");
    }
    let init = ThreeWaveState::initial(a.pump, a.signal, a.idler, a.w1, a.w2, a.gamma)?;
    let cfg = IntegratorConfig {
        stride: a.stride,
        ..IntegratorConfig::default()
    };
    let traj = integrate_with(&init, a.t_end, a.dt, &cfg)?;
    let res = manley_rowe_residual(&traj)?;
    let body = match a.out.format {
        Format::Csv => traj.to_csv(),
        Format::Json => {
            let samples: Vec<_> = traj
                .times()
                .iter()
                .zip(traj.states())
                .map(|(t, s)| {
                    let f = s.fields();
                    json!({ "t": t, "fields": f.map(|c| [c.re, c.im]), "manley_rowe": s.manley_rowe() })
                })
                .collect();
            to_json(
                &json!({ "steps": traj.steps(), "dt": traj.dt(), "residuals": res, "samples": samples }),
            )?
        }
    };
    emit(&a.out, &body)?;
    eprintln!(
        "ode: {} steps, Manley-Rowe drift {} {} {}",
        traj.steps(),
        fmt_f64(res[0]),
        fmt_f64(res[1]),
        fmt_f64(res[2])
    );
    Ok(true)
}

fn report(a: &ReportArgs) -> Result<bool> {
    let tol = a.tol.tolerances()?;
    let eps: Vec<f64> = a
        .eps_list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad --eps-list entry `{s}`"))
        })
        .collect::<Result<_>>()?;
    if eps.is_empty() {
        bail!("--eps-list is empty");
    }
    for e in &eps {
        positive("--eps-list entry", *e)?;
    }
    let mut records = Vec::new();
    for name in BUILTIN_NAMES {
        let s = builtin(name)?;
        for &e in &eps {
            let rec = run_scenario_with(&s, e, &tol)?;
            eprintln!(
                "{name:<24} eps={e:<8} {}/{} agree",
                rec.outcomes.iter().filter(|o| o.agree).count(),
                rec.outcomes.len()
            );
            records.push(rec);
        }
    }
    let body = match a.out.format {
        Format::Csv => {
            let mut out = String::from("scenario,eps,label,prob,lambda_max,verdict,agree\n");
            for r in &records {
                for o in &r.outcomes {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        r.scenario,
                        fmt_f64(r.eps),
                        o.label,
                        fmt_f64(o.prob),
                        fmt_f64(o.lambda_max),
                        o.verdict,
                        o.agree
                    ));
                }
            }
            out
        }
        Format::Json => to_json(&records)?,
    };
    emit(&a.out, &body)?;
    Ok(records.iter().all(VerificationRecord::pass))
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("JORCA_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("JORCA_THREADS=`{v}` is not a thread count"))?;
        if n == 0 {
            bail!("JORCA_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let out = match &cli.command {
        Cmd::Verify(a) => &a.out,
        Cmd::Sweep(a) => &a.out,
        Cmd::Scan(a) => &a.out,
        Cmd::Ode(a) => &a.out,
        Cmd::Report(a) => &a.out,
    };
    if let (Some(o), Some(c)) = (&out.output, &cli.config) {
        if o == c
            || o.canonicalize()
                .ok()
                .is_some_and(|p| c.canonicalize().ok() == Some(p))
        {
            bail!("--output would overwrite the config file");
        }
    }
    match &cli.command {
        Cmd::Verify(a) => verify(a),
        Cmd::Sweep(a) => sweep(a),
        Cmd::Scan(a) => scan(a),
        Cmd::Ode(a) => ode(a),
        Cmd::Report(a) => report(a),
    }
}

fn main() -> ExitCode {
    let raw: Vec<_> = std::env::args_os().collect();
    let config = raw
        .iter()
        .position(|a| a == "--config")
        .and_then(|i| raw.get(i + 1).cloned())
        .or_else(|| {
            raw.iter()
                .find_map(|a| a.to_str()?.strip_prefix("--config=").map(Into::into))
        });
    let args = match config::expand(raw) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    cli.config = config.map(PathBuf::from);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
