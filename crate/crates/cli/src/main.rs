//! Command-line surface for the bound-entanglement toolkit: analytic
//! self-checks, positivity-criteria reports, closed-form witness values,
//! and seeded multistart minimization over grids or tensor powers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bek_core::criteria::criteria_report;
use bek_core::optimizer::{
    conjecture_evidence, linear_grid, sweep_b, MinimizeOutcome, SeeSawConfig, SweepRecord,
    DEFAULT_SEED,
};
use bek_core::states::{flagged_mixture, rho_pent, werner, PentBasis};
use bek_core::verification::{default_suite, run_suite, CheckResult};
use bek_core::witness::{
    schmidt_rank, threshold_lambda, witness_value_normalized, witness_value_raw,
};
use bek_core::Operator;

/// Verdict cutoff: a minimum this far below zero counts as a negative
/// direction; anything closer to zero proves nothing.
const NEGATIVITY_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "bek",
    version,
    about = "Bound-entanglement toolkit: self-checks, criteria reports, and seeded rank-2 minimization"
)]
struct Cli {
    /// Emit machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analytic self-check suite (one pass/fail line per check)
    Verify(VerifyArgs),
    /// Report positivity criteria for a built-in state
    Criteria(CriteriaArgs),
    /// Evaluate the closed-form witness value at one lambda
    Witness(WitnessArgs),
    /// Minimize over a grid of mixing parameters b and write a CSV
    Sweep(SweepArgs),
    /// Search for a negative rank-2 direction on n state copies
    Search(SearchArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Corrupt the pentagon height (test mode proving checks can fail).
    #[arg(long, hide = true)]
    corrupt_height: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateKind {
    /// One-parameter two-qutrit family at --lambda
    Werner,
    /// The pentagon-tile complement state
    Pent,
    /// Tensor product of the two states above
    Product,
    /// Equal mixture of both states with a classical flag on side A
    Flagged,
}

impl StateKind {
    fn name(self) -> &'static str {
        match self {
            StateKind::Werner => "werner",
            StateKind::Pent => "pent",
            StateKind::Product => "product",
            StateKind::Flagged => "flagged",
        }
    }
}

#[derive(Args)]
struct CriteriaArgs {
    /// Which built-in state to analyze.
    #[arg(value_enum)]
    state: StateKind,
    /// Mixing parameter; required for every state except pent.
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct WitnessArgs {
    /// Mixing parameter (must exceed 1/8).
    #[arg(long)]
    lambda: f64,
    /// Report the unnormalized quadratic-form value (the default).
    #[arg(long, conflicts_with = "normalized")]
    raw: bool,
    /// Report the value normalized by trace factor and vector norm.
    #[arg(long)]
    normalized: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Smallest mixing parameter (must exceed 1/6).
    #[arg(long)]
    b_min: f64,
    /// Largest mixing parameter (at most 1/5).
    #[arg(long)]
    b_max: f64,
    /// Number of evenly spaced grid points.
    #[arg(long)]
    steps: usize,
    /// Random starts per grid point (the closed-form seed is start 0).
    #[arg(long, default_value_t = 32)]
    starts: usize,
    /// RNG seed for reproducible runs.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Draw the seed from OS entropy instead of the fixed default.
    #[arg(long, conflicts_with = "seed")]
    entropy: bool,
    /// Output CSV path; a manifest is written next to it.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// Number of copies.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    n: u8,
    /// Mixing parameter (at least 1/2).
    #[arg(long)]
    lambda: f64,
    /// Number of random starts.
    #[arg(long, default_value_t = 64)]
    starts: usize,
    /// RNG seed for reproducible runs.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Draw the seed from OS entropy instead of the fixed default.
    #[arg(long, conflicts_with = "seed")]
    entropy: bool,
    /// Write the minimizing vector to this path as a JSON certificate.
    #[arg(long)]
    cert: Option<PathBuf>,
}

fn main() -> ExitCode {
    restore_sigpipe();
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify(args) => cmd_verify(cli.json, args),
        Command::Criteria(args) => cmd_criteria(cli.json, args),
        Command::Witness(args) => cmd_witness(cli.json, args),
        Command::Sweep(args) => cmd_sweep(cli.json, args),
        Command::Search(args) => cmd_search(cli.json, args),
    };
    match outcome {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

/// The Rust runtime ignores SIGPIPE; restore conventional CLI behavior
/// so piping into `head` ends the process quietly.
#[cfg(unix)]
fn restore_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn restore_sigpipe() {}

/// Honors BEK_THREADS as a cap on worker parallelism.
fn init_thread_pool() {
    if let Ok(value) = std::env::var("BEK_THREADS") {
        match value.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid BEK_THREADS value {value:?}"),
        }
    }
}

/// Reports a bad argument combination through clap, exiting with the
/// usage-error code.
fn usage_error(message: String) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::InvalidValue, message)
        .exit()
}

/// Full-precision float rendering: 17 significant digits, byte-stable.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn effective_seed(seed: u64, entropy: bool) -> u64 {
    if entropy {
        rand::random()
    } else {
        seed
    }
}

fn cmd_verify(json: bool, args: &VerifyArgs) -> Result<ExitCode, String> {
    let results = if args.corrupt_height {
        let wrong = PentBasis::with_height(0.5 * (5.0_f64.sqrt() - 1.0).sqrt());
        run_suite(&wrong)
    } else {
        default_suite()
    };
    let failures: Vec<&CheckResult> = results.iter().filter(|c| !c.passed).collect();

    if json {
        let payload = json!({
            "command": "verify",
            "passed": failures.is_empty(),
            "checks": results,
        });
        print_json(&payload)?;
    } else {
        for check in &results {
            println!(
                "[{}] {:<36} residual {:>10.3e}  tolerance {:>9.1e}",
                if check.passed { "pass" } else { "FAIL" },
                check.name,
                check.residual,
                check.tolerance
            );
        }
        if failures.is_empty() {
            println!("all {} checks passed", results.len());
        } else {
            let names: Vec<&str> = failures.iter().map(|c| c.name).collect();
            println!(
                "{} of {} checks failed: {}",
                failures.len(),
                results.len(),
                names.join(", ")
            );
        }
    }
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn build_state(args: &CriteriaArgs) -> Operator {
    let lambda = || -> f64 {
        match args.lambda {
            Some(l) => l,
            None => usage_error(format!("state '{}' requires --lambda", args.state.name())),
        }
    };
    let isotropic = |l: f64| -> Operator {
        werner(l).unwrap_or_else(|e| usage_error(format!("invalid --lambda: {e}")))
    };
    match args.state {
        StateKind::Werner => isotropic(lambda()),
        StateKind::Pent => rho_pent(),
        StateKind::Product => isotropic(lambda()).tensor(&rho_pent()),
        StateKind::Flagged => flagged_mixture(&isotropic(lambda()), &rho_pent())
            .expect("both factors share the two-qutrit layout"),
    }
}

fn cmd_criteria(json: bool, args: &CriteriaArgs) -> Result<ExitCode, String> {
    let state = build_state(args);
    let report = criteria_report(&state).map_err(|e| e.to_string())?;

    if json {
        let payload = json!({
            "command": "criteria",
            "state": args.state.name(),
            "lambda": args.lambda,
            "report": report,
        });
        print_json(&payload)?;
    } else {
        println!("state: {}", args.state.name());
        if let Some(lambda) = args.lambda {
            println!("lambda: {}", sci(lambda));
        }
        println!("npt: {}", report.npt);
        println!("min_pt_eigenvalue: {}", sci(report.min_pt_eigenvalue));
        println!("reduction_ok: {}", report.reduction_ok);
        println!(
            "min_reduction_eigenvalue_a: {}",
            sci(report.min_reduction_eigenvalues.0)
        );
        println!(
            "min_reduction_eigenvalue_b: {}",
            sci(report.min_reduction_eigenvalues.1)
        );
        println!("ppt_invariant: {}", report.ppt_invariant);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_witness(json: bool, args: &WitnessArgs) -> Result<ExitCode, String> {
    let values = witness_value_raw(args.lambda)
        .and_then(|raw| witness_value_normalized(args.lambda).map(|norm| (raw, norm)));
    let (raw, normalized) = match values {
        Ok(pair) => pair,
        Err(e) => usage_error(format!("invalid --lambda: {e}")),
    };
    let convention = if args.normalized { "normalized" } else { "raw" };
    let value = if args.normalized { normalized } else { raw };
    let verdict = if value < -NEGATIVITY_TOL {
        "distillable"
    } else {
        "not detected"
    };

    if json {
        let payload = json!({
            "command": "witness",
            "lambda": args.lambda,
            "convention": convention,
            "value": value,
            "threshold_lambda": threshold_lambda(),
            "verdict": verdict,
        });
        print_json(&payload)?;
    } else {
        println!("lambda: {}", sci(args.lambda));
        println!("convention: {convention}");
        println!("value: {}", sci(value));
        println!("threshold_lambda: {}", sci(threshold_lambda()));
        println!("verdict: {verdict}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(json: bool, args: &SweepArgs) -> Result<ExitCode, String> {
    if args.b_min.is_nan() || args.b_min <= 1.0 / 6.0 {
        usage_error(format!("--b-min must exceed 1/6, got {}", args.b_min));
    }
    if args.b_max.is_nan() || args.b_max <= args.b_min {
        usage_error("--b-max must exceed --b-min".into());
    }
    if args.b_max > 0.2 {
        usage_error(format!("--b-max must be at most 1/5, got {}", args.b_max));
    }
    if args.steps < 2 {
        usage_error(format!("--steps must be at least 2, got {}", args.steps));
    }
    if args.starts == 0 {
        usage_error("--starts must be at least 1".into());
    }

    let seed = effective_seed(args.seed, args.entropy);
    let cfg = SeeSawConfig {
        num_starts: args.starts,
        rng_seed: seed,
        ..SeeSawConfig::default()
    };
    let grid = linear_grid(args.b_min, args.b_max, args.steps);
    let mut records: Vec<SweepRecord> = Vec::with_capacity(grid.len());
    let mut point_errors: Vec<String> = Vec::new();
    for result in sweep_b(&grid, &cfg) {
        match result {
            Ok(record) => records.push(record),
            Err(e) => {
                eprintln!("warning: skipping grid point: {e}");
                point_errors.push(e.to_string());
            }
        }
    }

    write_csv(&args.out, &records).map_err(|e| format!("writing {}: {e}", args.out.display()))?;
    let manifest_path = manifest_path_for(&args.out);
    let manifest = json!({
        "command": "sweep",
        "parameters": {
            "b_min": args.b_min,
            "b_max": args.b_max,
            "steps": args.steps,
            "starts": args.starts,
            "out": args.out.display().to_string(),
        },
        "rng_seed": seed,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    });
    write_pretty_json(&manifest_path, &manifest)
        .map_err(|e| format!("writing {}: {e}", manifest_path.display()))?;

    if json {
        let payload = json!({
            "command": "sweep",
            "rng_seed": seed,
            "rows": records.len(),
            "out": args.out.display().to_string(),
            "manifest": manifest_path.display().to_string(),
            "records": records,
            "errors": point_errors,
        });
        print_json(&payload)?;
    } else {
        for r in &records {
            println!(
                "b={} lambda={} min_value={} best_start={} iterations={} converged={}",
                sci(r.b),
                sci(r.lambda),
                sci(r.min_value),
                r.best_start,
                r.iterations,
                r.converged
            );
        }
        println!(
            "wrote {} rows to {} (manifest {})",
            records.len(),
            args.out.display(),
            manifest_path.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(json: bool, args: &SearchArgs) -> Result<ExitCode, String> {
    if args.lambda < 0.5 {
        usage_error(format!(
            "--lambda must be at least 1/2, got {}",
            args.lambda
        ));
    }
    if args.starts == 0 {
        usage_error("--starts must be at least 1".into());
    }
    let seed = effective_seed(args.seed, args.entropy);
    let cfg = SeeSawConfig {
        num_starts: args.starts,
        rng_seed: seed,
        ..SeeSawConfig::default()
    };
    let outcome =
        conjecture_evidence(args.n as usize, args.lambda, &cfg).map_err(|e| e.to_string())?;
    let verdict = if outcome.value < -NEGATIVITY_TOL {
        "negativity found"
    } else {
        "no negativity found"
    };

    let cert_path = match &args.cert {
        Some(path) => {
            write_certificate(path, &outcome, args, seed)?;
            Some(path.display().to_string())
        }
        None => None,
    };

    if json {
        let payload = json!({
            "command": "search",
            "n": args.n,
            "lambda": args.lambda,
            "starts": args.starts,
            "rng_seed": seed,
            "min_value": outcome.value,
            "best_start": outcome.best_start,
            "iterations": outcome.iterations,
            "converged": outcome.converged,
            "verdict": verdict,
            "certificate": cert_path,
        });
        print_json(&payload)?;
    } else {
        println!("n: {}", args.n);
        println!("lambda: {}", sci(args.lambda));
        println!("starts: {}", args.starts);
        println!("rng_seed: {seed}");
        println!("min_value: {}", sci(outcome.value));
        println!("best_start: {}", outcome.best_start);
        println!("iterations: {}", outcome.iterations);
        println!("converged: {}", outcome.converged);
        println!("verdict: {verdict}");
        if let Some(path) = cert_path {
            println!("certificate: {path}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// The minimizing vector with layout metadata, amplitudes as interleaved
/// real/imaginary pairs in row-major factor order.
fn write_certificate(
    path: &Path,
    outcome: &MinimizeOutcome,
    args: &SearchArgs,
    seed: u64,
) -> Result<(), String> {
    let (rank, _) = schmidt_rank(&outcome.vector).map_err(|e| e.to_string())?;
    let factors: Vec<serde_json::Value> = outcome
        .vector
        .layout()
        .factors()
        .iter()
        .map(|(dim, party)| json!({"dim": dim, "party": party}))
        .collect();
    let mut amplitudes = Vec::with_capacity(2 * outcome.vector.dim());
    for amp in outcome.vector.amps().iter() {
        amplitudes.push(amp.re);
        amplitudes.push(amp.im);
    }
    let payload = json!({
        "command": "search",
        "n": args.n,
        "lambda": args.lambda,
        "rng_seed": seed,
        "min_value": outcome.value,
        "schmidt_rank": rank,
        "layout": factors,
        "amplitudes": amplitudes,
    });
    write_pretty_json(path, &payload).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// CSV with a fixed header and 17-significant-digit floats; `\n` line
/// endings regardless of platform.
fn write_csv(path: &Path, records: &[SweepRecord]) -> std::io::Result<()> {
    let mut file = fs::File::create(path)?;
    let mut body = String::from("b,lambda,min_value,best_start,iterations,converged\n");
    for r in records {
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sci(r.b),
            sci(r.lambda),
            sci(r.min_value),
            r.best_start,
            r.iterations,
            r.converged
        ));
    }
    file.write_all(body.as_bytes())?;
    file.flush()
}

fn write_pretty_json(path: &Path, payload: &serde_json::Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(payload)?;
    text.push('\n');
    fs::write(path, text)
}

fn print_json(payload: &serde_json::Value) -> Result<(), String> {
    serde_json::to_string_pretty(payload)
        .map(|text| println!("{text}"))
        .map_err(|e| e.to_string())
}
