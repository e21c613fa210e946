//! unibound CLI: compute moment bounds from parameters, audit distribution
//! JSON files, run the seeded verification suite, and run the bound
//! comparison study.
//!
//! Exit codes: 0 = success / all checks pass, 1 = a mathematical violation
//! was found (a genuine finding), 2 = usage or input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use unibound::report::{fmt_sig6, to_json_string};
use unibound::{
    audit, compare, discrete_central_lb, lattice_variance_lb, parse_distribution, run_suite,
    AuditReport, BoundKind, BoundQuery, BoundResult, CompareReport, Distribution, MomentKind,
    ShapeClass, SuiteReport, TrialConfig,
};

#[derive(Parser)]
#[command(name = "unibound", version, about = "Moment bounds for monotone and unimodal distributions")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    /// Density non-increasing on [a, b].
    NonIncreasing,
    /// Density non-decreasing on [a, b].
    NonDecreasing,
    /// Density unimodal at --mode.
    Unimodal,
    /// Discrete support window (--xlo, --xhi) straddling the mean.
    DiscreteWindow,
    /// Unimodal pmf on consecutive integers with mode --mode.
    Lattice,
}

#[derive(Subcommand)]
enum Command {
    /// Print every bound applicable to the given shape and parameters.
    Bound {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        /// Mean of the distribution.
        #[arg(long)]
        mean: f64,
        /// Support left endpoint.
        #[arg(long)]
        a: Option<f64>,
        /// Support right endpoint.
        #[arg(long)]
        b: Option<f64>,
        /// Mode of the distribution.
        #[arg(long)]
        mode: Option<f64>,
        /// Moment order parameter r (raw bounds use r, even-central bounds
        /// constrain the 2r-th central moment).
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Left window point x_{j-1} for --shape discrete-window.
        #[arg(long)]
        xlo: Option<f64>,
        /// Right window point x_j for --shape discrete-window.
        #[arg(long)]
        xhi: Option<f64>,
        /// Only print the bound with this tag (e.g. "Thm2.2-eq2.16").
        #[arg(long)]
        which_bound: Option<String>,
    },
    /// Audit a distribution JSON file against every applicable bound.
    Audit {
        /// Path to {"type":"discrete",...} or {"type":"piecewise",...} JSON.
        input: PathBuf,
        /// Audit bounds for r up to this value (moments up to 2*r_max).
        #[arg(long, default_value_t = 3)]
        r_max: u32,
    },
    /// Run the seeded verification suite (generators + audits + tightness).
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per section (that many pmfs and that many densities).
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 12)]
        max_points: u32,
        #[arg(long, default_value_t = 64)]
        max_pieces: u32,
        #[arg(long, default_value_t = 3)]
        r_max: u32,
        #[arg(long, default_value_t = 1e-12)]
        abs_tol: f64,
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
        /// Where to write the smallest failing distribution, if any.
        #[arg(long, default_value = "unibound-counterexample.json")]
        counterexample_out: PathBuf,
    },
    /// Measure the discrete window bound against the lattice bound on random
    /// lattice unimodal pmfs.
    Compare {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 12)]
        max_points: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli.command, format) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, format: Format) -> Result<ExitCode, String> {
    match command {
        Command::Bound { shape, mean, a, b, mode, r, xlo, xhi, which_bound } => {
            cmd_bound(format, shape, mean, a, b, mode, r, xlo, xhi, which_bound)
        }
        Command::Audit { input, r_max } => cmd_audit(format, &input, r_max),
        Command::Verify {
            seed,
            trials,
            max_points,
            max_pieces,
            r_max,
            abs_tol,
            rel_tol,
            counterexample_out,
        } => {
            let cfg = TrialConfig {
                master_seed: seed,
                n_trials: trials,
                max_points,
                max_pieces,
                r_max,
                abs_tol,
                rel_tol,
            };
            cmd_verify(format, &cfg, &counterexample_out)
        }
        Command::Compare { seed, trials, max_points } => {
            let cfg = TrialConfig {
                master_seed: seed,
                n_trials: trials,
                max_points,
                ..TrialConfig::default()
            };
            cmd_compare(format, &cfg)
        }
    }
}

/// Worker-count cap from UNIBOUND_THREADS (no effect on results).
fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var("UNIBOUND_THREADS") {
        Ok(s) if s.trim().is_empty() => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| format!("UNIBOUND_THREADS must be a nonnegative integer, got {s:?}")),
        Err(_) => Ok(None),
    }
}

#[derive(Serialize)]
struct BoundOutput {
    shape: &'static str,
    mean: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<f64>,
    r: u32,
    bounds: Vec<BoundResult>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound(
    format: Format,
    shape: ShapeArg,
    mean: f64,
    a: Option<f64>,
    b: Option<f64>,
    mode: Option<f64>,
    r: u32,
    xlo: Option<f64>,
    xhi: Option<f64>,
    which_bound: Option<String>,
) -> Result<ExitCode, String> {
    if !mean.is_finite() {
        return Err("--mean must be finite".into());
    }
    let (shape_name, bounds): (&'static str, Vec<BoundResult>) = match shape {
        ShapeArg::NonIncreasing | ShapeArg::NonDecreasing => {
            let a = a.ok_or("--a is required for monotone shapes")?;
            let b = b.ok_or("--b is required for monotone shapes")?;
            let class = if shape == ShapeArg::NonIncreasing {
                ShapeClass::NonIncreasing
            } else {
                ShapeClass::NonDecreasing
            };
            let query = BoundQuery { a: Some(a), b: Some(b), mode: None, mean, order: r, shape: class };
            let name = if shape == ShapeArg::NonIncreasing { "non-increasing" } else { "non-decreasing" };
            (name, query.evaluate().map_err(|e| e.to_string())?)
        }
        ShapeArg::Unimodal => {
            let m = mode.ok_or("--mode is required for --shape unimodal")?;
            let query = BoundQuery {
                a,
                b,
                mode: Some((m, m)),
                mean,
                order: r,
                shape: ShapeClass::Unimodal { mode_lo: m, mode_hi: m },
            };
            ("unimodal", query.evaluate().map_err(|e| e.to_string())?)
        }
        ShapeArg::DiscreteWindow => {
            let x_lo = xlo.ok_or("--xlo is required for --shape discrete-window")?;
            let x_hi = xhi.ok_or("--xhi is required for --shape discrete-window")?;
            let bound = discrete_central_lb(x_lo, x_hi, mean, r).map_err(|e| e.to_string())?;
            ("discrete-window", vec![bound])
        }
        ShapeArg::Lattice => {
            let m = mode.ok_or("--mode is required for --shape lattice")?;
            if m.fract() != 0.0 {
                return Err(format!("--shape lattice needs an integer --mode, got {m}"));
            }
            ("lattice", vec![lattice_variance_lb(mean, m)])
        }
    };

    let bounds: Vec<BoundResult> = match &which_bound {
        Some(tag) => {
            let want = tag.to_lowercase();
            let filtered: Vec<BoundResult> = bounds
                .into_iter()
                .filter(|b| b.source.tag().to_lowercase() == want)
                .collect();
            if filtered.is_empty() {
                return Err(format!("no applicable bound has tag {tag:?}"));
            }
            filtered
        }
        None => bounds,
    };

    match format {
        Format::Json => {
            let out = BoundOutput { shape: shape_name, mean, a, b, mode, r, bounds };
            println!("{}", to_json_string(&out));
        }
        Format::Human => {
            for bd in &bounds {
                println!("{}", human_bound_line(bd));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn moment_name(kind: MomentKind, order: u32) -> String {
    match kind {
        MomentKind::Raw => format!("raw moment r={order}"),
        MomentKind::Central if order == 2 => "variance".to_string(),
        MomentKind::Central => format!("central moment r={order}"),
    }
}

fn human_bound_line(b: &BoundResult) -> String {
    let direction = match b.kind {
        BoundKind::Lower => ">=",
        BoundKind::Upper => "<=",
    };
    let witness = b
        .witness
        .map(|w| format!("   witness: alpha={} beta={}", fmt_sig6(w.alpha), fmt_sig6(w.beta)))
        .unwrap_or_default();
    format!(
        "{:<18} {} {} {}{}",
        b.source.label(),
        moment_name(b.target_kind, b.target_order),
        direction,
        fmt_sig6(b.value),
        witness
    )
}

fn cmd_audit(format: Format, input: &std::path::Path, r_max: u32) -> Result<ExitCode, String> {
    let text =
        fs::read_to_string(input).map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let dist = parse_distribution(&text).map_err(|e| e.to_string())?;
    let cfg = TrialConfig { r_max, ..TrialConfig::default() };
    let report = audit(&dist, &cfg);

    match format {
        Format::Json => println!("{}", to_json_string(&report)),
        Format::Human => print_audit_human(&report),
    }
    Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn print_audit_human(report: &AuditReport) {
    let size_word = match report.distribution {
        Distribution::Discrete(_) => "points",
        Distribution::Piecewise(_) => "pieces",
    };
    println!(
        "distribution: {} ({} {}), id {}",
        report.family,
        report.distribution.size(),
        size_word,
        report.id
    );
    let shape = match report.shape {
        ShapeClass::NonIncreasing => "non-increasing".to_string(),
        ShapeClass::NonDecreasing => "non-decreasing".to_string(),
        ShapeClass::Unimodal { mode_lo, mode_hi } => {
            format!("unimodal, mode plateau [{}, {}]", fmt_sig6(mode_lo), fmt_sig6(mode_hi))
        }
        ShapeClass::NotUnimodal => "not unimodal".to_string(),
    };
    println!("shape: {shape}");
    println!("mean {}   variance {}", fmt_sig6(report.mean), fmt_sig6(report.variance));
    println!("moments:");
    for m in &report.moments {
        let kind = match m.kind {
            MomentKind::Raw => "raw    ",
            MomentKind::Central => "central",
        };
        println!("  {kind} r={}  {}", m.order, fmt_sig6(m.value));
    }
    println!("checks:");
    for c in &report.checks {
        let direction = match c.kind {
            BoundKind::Lower => ">=",
            BoundKind::Upper => "<=",
        };
        let mode = c.mode.map(|m| format!("   mode={}", fmt_sig6(m))).unwrap_or_default();
        let note = c.note.as_deref().map(|n| format!("   ({n})")).unwrap_or_default();
        println!(
            "  {} {:<16} {} {} {}   actual {}   margin {}{}{}",
            if c.pass { "PASS" } else { "FAIL" },
            c.source.tag(),
            moment_name(c.target_kind, c.target_order),
            direction,
            fmt_sig6(c.bound),
            fmt_sig6(c.actual),
            fmt_sig6(c.margin),
            mode,
            note
        );
    }
    if !report.not_applicable.is_empty() {
        println!("not applicable:");
        for s in &report.not_applicable {
            println!("  - {}: {}", s.source.tag(), s.reason);
        }
    }
    println!(
        "result: {} ({} checks, {} failed)",
        if report.pass { "PASS" } else { "FAIL" },
        report.checks.len(),
        report.checks.iter().filter(|c| !c.pass).count()
    );
}

fn cmd_verify(
    format: Format,
    cfg: &TrialConfig,
    counterexample_out: &std::path::Path,
) -> Result<ExitCode, String> {
    let threads = threads_from_env()?;
    let report = run_suite(cfg, threads).map_err(|e| e.to_string())?;

    match format {
        Format::Json => println!("{}", to_json_string(&report)),
        Format::Human => print_suite_human(&report),
    }

    if report.pass {
        Ok(ExitCode::SUCCESS)
    } else {
        if let Some(cex) = report.counterexample.as_ref().and_then(|v| v.distribution.as_ref()) {
            let text = to_json_string(cex);
            if let Err(e) = fs::write(counterexample_out, &text) {
                eprintln!("could not write counterexample to {}: {e}", counterexample_out.display());
            } else {
                eprintln!("counterexample written to {}", counterexample_out.display());
            }
        }
        Ok(ExitCode::from(1))
    }
}

fn print_suite_human(report: &SuiteReport) {
    println!(
        "verification suite: seed={} trials={} (per section)",
        report.config.master_seed, report.config.n_trials
    );
    println!(
        "  discrete:   {} trials, {} checks, {} violations",
        report.discrete.trials, report.discrete.checks, report.discrete.violations
    );
    println!(
        "  density:    {} trials, {} checks, {} violations",
        report.density.trials, report.density.checks, report.density.violations
    );
    println!(
        "  mean-range: {} checks, {} violations",
        report.mean_range.checks, report.mean_range.violations
    );
    println!(
        "  tightness:  {} pairs, {} checks, {} violations, max relative margin {}",
        report.tightness.pairs,
        report.tightness.checks,
        report.tightness.violations,
        fmt_sig6(report.tightness.max_rel_margin)
    );
    for v in &report.violations {
        println!(
            "  VIOLATION [{}] trial {} seed {}: {}",
            v.section, v.trial, v.seed, v.check
        );
    }
    println!(
        "result: {} ({} checks, {} violations)",
        if report.pass { "PASS" } else { "FAIL" },
        report.total_checks,
        report.total_violations
    );
}

fn cmd_compare(format: Format, cfg: &TrialConfig) -> Result<ExitCode, String> {
    let threads = threads_from_env()?;
    let report = compare(cfg, threads).map_err(|e| e.to_string())?;
    match format {
        Format::Json => println!("{}", to_json_string(&report)),
        Format::Human => print_compare_human(&report),
    }
    Ok(ExitCode::SUCCESS)
}

fn print_compare_human(report: &CompareReport) {
    println!(
        "window bound (Thm2.5-eq2.40, r=1) vs lattice bound (Eq1.1) over {} trials",
        report.trials
    );
    println!("  generator: {}", report.generator);
    println!(
        "  window wins {} ({}), lattice wins {}, ties {}",
        report.window_wins,
        fmt_sig6(report.window_win_fraction),
        report.lattice_wins,
        report.ties
    );
    if let Some(mean_ratio) = report.mean_ratio {
        println!("  mean window/lattice ratio {}", fmt_sig6(mean_ratio));
    }
    if let Some(case) = &report.max_ratio {
        println!(
            "  max ratio {} at trial {} (window {}, lattice {})",
            fmt_sig6(case.ratio.unwrap_or(f64::NAN)),
            case.trial.map(|t| t.to_string()).unwrap_or_default(),
            fmt_sig6(case.window_bound),
            fmt_sig6(case.lattice_bound)
        );
    }
    if let Some(case) = &report.min_ratio {
        println!(
            "  min ratio {} at trial {} (window {}, lattice {})",
            fmt_sig6(case.ratio.unwrap_or(f64::NAN)),
            case.trial.map(|t| t.to_string()).unwrap_or_default(),
            fmt_sig6(case.window_bound),
            fmt_sig6(case.lattice_bound)
        );
    }
    println!(
        "  example-1 reference: window {}, lattice {}, ratio {}",
        fmt_sig6(report.example1.window_bound),
        fmt_sig6(report.example1.lattice_bound),
        fmt_sig6(report.example1.ratio.unwrap_or(f64::NAN))
    );
}
