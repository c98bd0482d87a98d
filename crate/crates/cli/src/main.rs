//! `o2hopf`: onset, normal-form coefficients, reduced dynamics, PDE runs and sweeps.

mod failure;
mod manifest;
mod params;
mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use o2hopf_core::normalform::{self, Route};
use o2hopf_core::pdesim::{self, InitSpec, SimConfig};
use o2hopf_core::reduced::{self, BranchKind, ReducedSystem, Stability};
use o2hopf_core::spectral::{self, DEFAULT_IMAG_TOL, DEFAULT_N_MAX};
use o2hopf_core::{verify, Complex64, ModelParams};
use serde::Serialize;
use serde_json::json;

use failure::Failure;
use manifest::RunManifest;
use params::ParamArgs;

#[derive(Parser, Debug)]
#[command(name = "o2hopf", version, about = "O(2)-equivariant Hopf analysis of the diffusive Brusselator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dispersion relation and Hopf onset scan
    Onset(OnsetArgs),
    /// Normal-form coefficients a, b, c along every route
    Coeffs(CoeffsArgs),
    /// Regime of the reduced normal form
    Classify(ClassifyArgs),
    /// Branches of the reduced normal form, optionally a trajectory
    Branch(BranchArgs),
    /// Pseudospectral simulation of the full PDE
    Simulate(SimulateArgs),
    /// Grid sweep over alpha, delta1, delta2 and mu, written as CSV
    Sweep(SweepArgs),
    /// Run the acceptance checks
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Write the JSON record here (plus `<path>.manifest.json`) instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the command's CSV table here
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OnsetArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: i64,
    /// Tolerance on |Re lambda| for a mode to count as critical
    #[arg(long, default_value_t = DEFAULT_IMAG_TOL)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

fn parse_route(s: &str) -> Result<Route, String> {
    Route::parse(s).ok_or_else(|| format!("unknown route `{s}` (paper_closed_form, direct, projection, asymptotic)"))
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Report a single route instead of the full comparison
    #[arg(long, value_parser = parse_route)]
    route: Option<Route>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = parse_route, default_value = "projection")]
    route: Route,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct BranchArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_parser = parse_route, default_value = "projection")]
    route: Route,
    /// Start of a trajectory written to --csv, as `r1:r2` (phases zero)
    #[arg(long)]
    start: Option<String>,
    /// Trajectory length
    #[arg(long, default_value_t = 200.0)]
    tmax: f64,
    /// Trajectory sample interval
    #[arg(long, default_value_t = 0.5)]
    dt: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 128)]
    n_grid: usize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 2000.0)]
    tmax: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial perturbation, `k:eps` or `random:eps`
    #[arg(long, default_value = "1:1e-3")]
    perturb: String,
    /// Disable the 2/3 dealiasing filter
    #[arg(long)]
    no_dealias: bool,
    /// Spacing of the recorded samples
    #[arg(long, default_value_t = 0.05)]
    sample_interval: f64,
    /// Modes of u1 recorded in the time series (mode 1 is always included)
    #[arg(long, value_delimiter = ',', default_values_t = [1i64, 2])]
    track: Vec<i64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Grid axis `name=start:end:count` over alpha, delta1, delta2 or mu (repeatable)
    #[arg(long = "grid", required = true, value_parser = sweep::GridAxis::parse, allow_hyphen_values = true)]
    grid: Vec<sweep::GridAxis>,
    /// Route used for the regime columns
    #[arg(long, value_parser = parse_route, default_value = "projection")]
    route: Route,
    /// Output CSV
    #[arg(long)]
    out: PathBuf,
    /// Continue an interrupted sweep with the same configuration
    #[arg(long)]
    resume: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Skip the long PDE criteria (6 and 7)
    #[arg(long)]
    quick: bool,
    /// Run only these criteria (repeatable)
    #[arg(long = "criterion", value_parser = clap::value_parser!(u8).range(1..=8))]
    criteria: Vec<u8>,
    /// Also require every file in this directory to be listed by exactly one manifest
    #[arg(long)]
    outputs: Option<PathBuf>,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("o2hopf: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Onset(a) => onset(a),
        Command::Coeffs(a) => coeffs(a),
        Command::Classify(a) => classify(a),
        Command::Branch(a) => branch(a),
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Verify(a) => run_verify(a),
    }
}

/// Print `record` or write it to `--out`; then write the manifest for every file produced.
fn emit(
    command: &str,
    params: Option<&ModelParams>,
    config: serde_json::Value,
    record: &impl Serialize,
    out: &OutArgs,
    extra: &[PathBuf],
) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(record)? + "\n";
    let mut files = Vec::new();
    match &out.out {
        Some(path) => {
            std::fs::write(path, text)?;
            files.push(path.clone());
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    files.extend(extra.iter().cloned());
    if !files.is_empty() {
        RunManifest::new(command, params.map(|p| p.raw()), &config).write(&files)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ModeRow {
    n: i64,
    re1: f64,
    im1: f64,
    re2: f64,
    im2: f64,
}

fn onset(a: OnsetArgs) -> Result<(), Failure> {
    let p = a.params.params()?;
    let info = p.onset();
    let modes: Vec<_> = (-a.n_max.max(0)..=a.n_max.max(0))
        .map(|n| spectral::mode_eigenvalues(&p, n, p.beta()))
        .collect();
    // an inadmissible set is reported with a flag, not rejected
    let scan = match spectral::onset_scan(&p, p.beta(), a.n_max, a.tol) {
        Ok(s) => Some(s),
        Err(o2hopf_core::Error::InadmissibleRegime { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let record = json!({
        "params": p.raw(),
        "beta1": info.beta1,
        "omega": info.omega,
        "omega_squared": info.omega_squared,
        "mu": info.mu,
        "admissible": info.admissible,
        "assumption_bound": info.assumption_bound,
        "modes": modes.iter().map(|m| ModeRow {
            n: m.n,
            re1: m.roots[0].re,
            im1: m.roots[0].im,
            re2: m.roots[1].re,
            im2: m.roots[1].im,
        }).collect::<Vec<_>>(),
        "critical_modes": scan.as_ref().map(|s| s.critical_modes.clone()),
        "verdict": scan.as_ref().map(|s| s.verdict),
        "certificate": scan.as_ref().map(|s| s.certificate),
        "turing": spectral::turing_check(&p),
    });
    let mut extra = Vec::new();
    if let Some(path) = &a.out.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["n", "k", "re_lambda_max", "im_lambda"])?;
        for m in &modes {
            let lead = if m.roots[0].re >= m.roots[1].re { m.roots[0] } else { m.roots[1] };
            w.serialize((m.n, m.k, m.max_real_part, lead.im.abs()))?;
        }
        w.flush()?;
        extra.push(path.clone());
    }
    let config = json!({"params": p.raw(), "n_max": a.n_max, "tol": a.tol});
    emit("onset", Some(&p), config, &record, &a.out, &extra)
}

fn coeffs(a: CoeffsArgs) -> Result<(), Failure> {
    let p = a.params.params()?;
    let config = json!({"params": p.raw(), "route": a.route});
    let mut extra = Vec::new();
    if let Some(path) = &a.out.csv {
        let row = sweep::evaluate(0, p.raw(), params::BetaSpec::Beta(p.beta()), a.route.unwrap_or(Route::Projection));
        sweep::write_rows(path, &[row])?;
        extra.push(path.clone());
    }
    match a.route {
        None => {
            let report = normalform::coeffs_report(&p)?;
            emit("coeffs", Some(&p), config, &report, &a.out, &extra)
        }
        Some(route) => {
            let c = normalform::coeffs(&p, route)?;
            let record = json!({"params": p.raw(), "onset": p.onset(), "coefficients": c});
            emit("coeffs", Some(&p), config, &record, &a.out, &extra)
        }
    }
}

fn reduced_system(p: &ModelParams, route: Route) -> Result<(normalform::NormalFormCoeffs, ReducedSystem), Failure> {
    let nf = normalform::coeffs(p, route)?;
    let sys = ReducedSystem::from_coeffs(&nf, p.onset().mu);
    Ok((nf, sys))
}

fn classify(a: ClassifyArgs) -> Result<(), Failure> {
    let p = a.params.params()?;
    let (nf, sys) = reduced_system(&p, a.route)?;
    let record = json!({
        "params": p.raw(),
        "route": a.route,
        "mu": sys.mu,
        "coefficients": nf,
        "regime": reduced::classify_regime(&sys),
    });
    let config = json!({"params": p.raw(), "route": a.route});
    emit("classify", Some(&p), config, &record, &a.out, &[])
}

fn parse_start(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::validation(format!("--start must be `r1:r2`, got `{s}`"));
    let (x, y) = s.split_once(':').ok_or_else(bad)?;
    let r1: f64 = x.trim().parse().map_err(|_| bad())?;
    let r2: f64 = y.trim().parse().map_err(|_| bad())?;
    if !(r1 >= 0.0 && r2 >= 0.0 && r1.is_finite() && r2.is_finite()) {
        return Err(bad());
    }
    Ok((r1, r2))
}

fn branch(a: BranchArgs) -> Result<(), Failure> {
    let p = a.params.params()?;
    let (nf, sys) = reduced_system(&p, a.route)?;
    let found = reduced::branches(&sys);
    let mut extra = Vec::new();
    if let Some(path) = &a.out.csv {
        let (r1, r2) = match &a.start {
            Some(s) => parse_start(s)?,
            None => default_start(&found),
        };
        let rows = reduced::integrate_truncated(&sys, Complex64::new(r1, 0.0), Complex64::new(r2, 0.0), a.tmax, a.dt)?;
        let mut w = csv::Writer::from_path(path)?;
        for r in &rows {
            w.serialize(r)?;
        }
        w.flush()?;
        extra.push(path.clone());
    } else if a.start.is_some() {
        return Err(Failure::validation("--start needs --csv for the trajectory"));
    }
    let record = json!({
        "params": p.raw(),
        "route": a.route,
        "mu": sys.mu,
        "coefficients": nf,
        "branches": found,
    });
    let config = json!({"params": p.raw(), "route": a.route, "start": a.start, "tmax": a.tmax, "dt": a.dt});
    emit("branch", Some(&p), config, &record, &a.out, &extra)
}

/// A point near the first nontrivial branch, or a small generic amplitude.
fn default_start(found: &[reduced::BranchPoint]) -> (f64, f64) {
    found
        .iter()
        .find(|b| b.kind != BranchKind::Trivial && b.stability != Stability::Degenerate)
        .map(|b| (0.5 * b.r1 + 1e-3, 0.5 * b.r2 + 1e-3))
        .unwrap_or((1e-2, 5e-3))
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let p = a.params.params()?;
    let init = InitSpec::parse(&a.perturb)?;
    let cfg = SimConfig {
        n_grid: a.n_grid,
        dt: a.dt,
        t_max: a.tmax,
        dealias: !a.no_dealias,
        init,
        seed: a.seed,
        ..SimConfig::default()
    };
    cfg.validate()?;
    let mut tracked = vec![1];
    tracked.extend(a.track.iter().copied().filter(|&k| k != 1));
    let run = pdesim::simulate(&p, &cfg, &tracked, a.sample_interval)?;
    let summary = pdesim::summarize_run(&p, &run)?;
    let mut extra = Vec::new();
    if let Some(path) = &a.out.csv {
        write_series(path, &run)?;
        extra.push(path.clone());
    }
    let verdict = if summary.decayed {
        "mode 1 decayed"
    } else if summary.settled {
        "mode 1 saturated"
    } else {
        "mode 1 not settled"
    };
    let record = json!({
        "params": p.raw(),
        "config": cfg,
        "tracked": run.tracked,
        "samples": run.samples.len(),
        "final_time": run.final_state.time,
        "final_means": run.final_state.means(),
        "saturated_amplitude": summary.amplitude,
        "frequency": summary.frequency,
        "uniform_amplitude": summary.mode0_amplitude,
        "uniform_frequency": summary.mode0_frequency,
        "summary": summary,
        "verdict": verdict,
    });
    let config = json!({"params": p.raw(), "config": cfg, "tracked": run.tracked, "sample_interval": a.sample_interval});
    emit("simulate", Some(&p), config, &record, &a.out, &extra)
}

fn write_series(path: &Path, run: &pdesim::SimRun) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    for k in &run.tracked {
        header.push(format!("mode{k}_re"));
        header.push(format!("mode{k}_im"));
    }
    header.push("mean_u1".into());
    header.push("mean_u2".into());
    w.write_record(&header)?;
    for s in &run.samples {
        let mut rec = vec![s.t];
        for c in &s.modes {
            rec.push(c.re);
            rec.push(c.im);
        }
        rec.extend(s.means);
        w.serialize(rec)?;
    }
    w.flush()?;
    Ok(())
}

fn run_sweep(a: SweepArgs) -> Result<(), Failure> {
    let (raw, spec) = a.params.resolve()?;
    let config = sweep::SweepConfig {
        base: raw,
        beta: match spec {
            params::BetaSpec::Beta(b) => Some(b),
            params::BetaSpec::Mu(_) => None,
        },
        mu: match spec {
            params::BetaSpec::Mu(m) => m,
            params::BetaSpec::Beta(_) => 0.0,
        },
        grid: a.grid,
        regime_route: a.route,
    };
    let outcome = sweep::run(&config, &a.out, a.resume)?;
    eprintln!(
        "o2hopf sweep: {} rows ({} resumed, {} with error codes) -> {}",
        outcome.rows,
        outcome.resumed,
        outcome.failed_rows,
        a.out.display()
    );
    Ok(())
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let ids: Vec<u8> = if !a.criteria.is_empty() {
        a.criteria.clone()
    } else if a.quick {
        verify::QUICK.to_vec()
    } else {
        verify::ALL.to_vec()
    };
    let mut reports = Vec::new();
    for id in ids {
        let r = verify::run_criterion(id).expect("criterion id validated by clap");
        println!("{}", r.summary_line());
        reports.push(r);
    }
    let mut failed: Vec<String> = reports.iter().filter(|r| !r.passed).map(|r| format!("criterion {}", r.id)).collect();
    let mut missing = Vec::new();
    if let Some(dir) = &a.outputs {
        missing = manifest::unreferenced_outputs(dir)?;
        let line = if missing.is_empty() {
            format!("[PASS] manifests: every output in {} has provenance", dir.display())
        } else {
            format!("[FAIL] manifests: outputs without exactly one manifest: {}", missing.join(", "))
        };
        println!("{line}");
        if !missing.is_empty() {
            failed.push("manifest completeness".into());
        }
    }
    if let Some(path) = &a.out {
        let record = json!({"criteria": reports, "unreferenced_outputs": missing});
        std::fs::write(path, serde_json::to_string_pretty(&record)? + "\n")?;
        RunManifest::new("verify", None, &json!({"quick": a.quick, "criteria": a.criteria})).write(std::slice::from_ref(path))?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Acceptance(failed.join(", ")))
    }
}
