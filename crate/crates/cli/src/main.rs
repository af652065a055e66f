//! Command-line front end: evaluate single mixing points, sweep `beta` or
//! `length` into reproducible CSV files, and run the verification suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 verification
//! failure.

mod filecfg;
mod format;

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use format::sig12;
use wellmix::oracle::Cutoff;
use wellmix::series::DEFAULT_TOL;
use wellmix::thermo;
use wellmix::ThermoReport64;
use wellmix::verify::{run_full_suite, VerifyOptions};
use wellmix::{Error as CoreError, LabelMode, PhysicalConfig, ScenarioPair, Statistics};

#[derive(Parser)]
#[command(
    name = "wellmix",
    version,
    about = "Mixing entropy and isothermal work for few particles in a split 1D box"
)]
struct Cli {
    /// Flat key=value file supplying defaults for any flag; explicit flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one (beta, length) point and print key=value lines
    Point(PointArgs),
    /// Sweep beta or length over a grid and write a CSV file
    Sweep(SweepArgs),
    /// Run the built-in verification suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PointArgs {
    /// Particle number (positive even)
    #[arg(long)]
    n: Option<u32>,
    /// Whether particles carry internal color labels
    #[arg(long, value_enum)]
    colors: Option<ColorsArg>,
    /// Exchange statistics to report (default: all valid for the label mode)
    #[arg(long, value_enum)]
    stat: Option<StatArg>,
    /// Inverse temperature (reduced units)
    #[arg(long)]
    beta: Option<f64>,
    /// Full trap width (reduced units)
    #[arg(long)]
    length: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Particle number (positive even)
    #[arg(long)]
    n: Option<u32>,
    /// Label mode for the bose/fermi columns; the dist columns always come
    /// from the colored (non-identical) family
    #[arg(long, value_enum)]
    colors: Option<ColorsArg>,
    /// Which parameter to sweep
    #[arg(long, value_enum)]
    sweep: Option<SweepParamArg>,
    /// Grid start (inclusive)
    #[arg(long)]
    from: Option<f64>,
    /// Grid end (inclusive)
    #[arg(long)]
    to: Option<f64>,
    /// Number of grid points (>= 2)
    #[arg(long)]
    steps: Option<usize>,
    /// Grid spacing (default: linear)
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
    /// Fixed inverse temperature when sweeping length
    #[arg(long)]
    beta: Option<f64>,
    /// Fixed trap width when sweeping beta
    #[arg(long)]
    length: Option<f64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Multiplier applied to every check tolerance
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Force a fixed oracle spectrum cutoff instead of the adaptive one
    #[arg(long)]
    oracle_nmax: Option<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColorsArg {
    With,
    Without,
}

impl ColorsArg {
    fn labels(self) -> LabelMode {
        match self {
            ColorsArg::With => LabelMode::WithColors,
            ColorsArg::Without => LabelMode::WithoutColors,
        }
    }

    fn token(self) -> &'static str {
        match self {
            ColorsArg::With => "with",
            ColorsArg::Without => "without",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatArg {
    Bose,
    Fermi,
    Dist,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParamArg {
    Beta,
    Length,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpacingArg {
    Linear,
    Geometric,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn missing(flag: &str) -> Failure {
    usage(format!("{flag} is required (flag or config file)"))
}

/// Bad user parameters are usage errors; everything else is a numeric
/// range failure.
fn classify(err: CoreError) -> Failure {
    match err {
        CoreError::NonPositive { .. }
        | CoreError::OddParticleNumber(_)
        | CoreError::ParticleCapExceeded { .. }
        | CoreError::DistinguishableNeedsColors => Failure::Usage(err.to_string()),
        other => Failure::Numeric(other.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let map = match &cli.config {
        Some(path) => match filecfg::load(path) {
            Ok(map) => map,
            Err(msg) => {
                eprintln!("usage error: {msg}");
                return ExitCode::from(1);
            }
        },
        None => HashMap::new(),
    };
    let outcome = match cli.command {
        Command::Point(args) => run_point(args, &map),
        Command::Sweep(args) => run_sweep(args, &map),
        Command::Verify(args) => run_verify(args, &map),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_enum<T: ValueEnum>(s: &str) -> Result<T, String> {
    T::from_str(s, true)
}

fn statistics_for(stat: StatArg, labels: LabelMode) -> Result<Vec<Statistics>, Failure> {
    let all = match labels {
        LabelMode::WithColors => vec![
            Statistics::Bose,
            Statistics::Fermi,
            Statistics::Distinguishable,
        ],
        LabelMode::WithoutColors => vec![Statistics::Bose, Statistics::Fermi],
    };
    match stat {
        StatArg::All => Ok(all),
        StatArg::Bose => Ok(vec![Statistics::Bose]),
        StatArg::Fermi => Ok(vec![Statistics::Fermi]),
        StatArg::Dist if labels == LabelMode::WithColors => {
            Ok(vec![Statistics::Distinguishable])
        }
        StatArg::Dist => Err(usage(
            "distinguishable statistics requires --colors with",
        )),
    }
}

fn run_point(mut args: PointArgs, map: &HashMap<String, String>) -> Result<ExitCode, Failure> {
    for step in [
        filecfg::fill(&mut args.n, map, "n", |s| s.parse().map_err(|e| format!("{e}"))),
        filecfg::fill(&mut args.colors, map, "colors", parse_enum),
        filecfg::fill(&mut args.stat, map, "stat", parse_enum),
        filecfg::fill(&mut args.beta, map, "beta", parse_f64),
        filecfg::fill(&mut args.length, map, "length", parse_f64),
    ] {
        step.map_err(usage)?;
    }
    let n = args.n.ok_or_else(|| missing("--n"))?;
    let colors = args.colors.ok_or_else(|| missing("--colors"))?;
    let beta = args.beta.ok_or_else(|| missing("--beta"))?;
    let length = args.length.ok_or_else(|| missing("--length"))?;
    let labels = colors.labels();
    let stats = statistics_for(args.stat.unwrap_or(StatArg::All), labels)?;
    let config = PhysicalConfig::new(beta, length).map_err(classify)?;
    let mut out = String::new();
    out.push_str(&format!("n={n}\n"));
    out.push_str(&format!("colors={}\n", colors.token()));
    out.push_str(&format!("beta={}\n", sig12(beta)));
    out.push_str(&format!("length={}\n", sig12(length)));
    out.push_str(&format!("q={}\n", sig12(config.boltzmann_base())));
    for stat in stats {
        let pair = ScenarioPair::new(n, labels, stat).map_err(classify)?;
        let report = thermo::report(&pair, &config, DEFAULT_TOL)
            .map_err(|e| Failure::Numeric(e.to_string()))?;
        push_report_block(&mut out, &report);
    }
    Ok(write_stdout(&out))
}

fn push_report_block(out: &mut String, r: &ThermoReport64) {
    let fields = [
        ("stat", r.pair.statistics.to_string()),
        ("z_unmixed", sig12(r.z_unmixed.value)),
        ("z_unmixed_error", sig12(r.z_unmixed.error_bound)),
        ("z_mixed", sig12(r.z_mixed.value)),
        ("z_mixed_error", sig12(r.z_mixed.error_bound)),
        ("log_z_unmixed", sig12(r.log_z_unmixed)),
        ("log_z_mixed", sig12(r.log_z_mixed)),
        ("s_unmixed", sig12(r.s_unmixed)),
        ("s_unmixed_error", sig12(r.s_unmixed_err)),
        ("s_mixed", sig12(r.s_mixed)),
        ("s_mixed_error", sig12(r.s_mixed_err)),
        ("mean_energy_unmixed", sig12(r.mean_energy_unmixed)),
        ("mean_energy_mixed", sig12(r.mean_energy_mixed)),
        ("delta_s", sig12(r.delta_s)),
        ("work", sig12(r.work)),
    ];
    for (key, value) in fields {
        out.push_str(&format!("{key}={value}\n"));
    }
}

/// Write the buffered report, treating a closed pipe as a normal exit.
fn write_stdout(text: &str) -> ExitCode {
    use std::io::Write;
    match std::io::stdout().write_all(text.as_bytes()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("io error: {e}");
            ExitCode::from(1)
        }
    }
}

const CSV_HEADER: &str =
    "param,delta_s_bose,delta_s_fermi,delta_s_dist,work_bose,work_fermi,work_dist,classical_ref";

fn run_sweep(mut args: SweepArgs, map: &HashMap<String, String>) -> Result<ExitCode, Failure> {
    for step in [
        filecfg::fill(&mut args.n, map, "n", |s| s.parse().map_err(|e| format!("{e}"))),
        filecfg::fill(&mut args.colors, map, "colors", parse_enum),
        filecfg::fill(&mut args.sweep, map, "sweep", parse_enum),
        filecfg::fill(&mut args.from, map, "from", parse_f64),
        filecfg::fill(&mut args.to, map, "to", parse_f64),
        filecfg::fill(&mut args.steps, map, "steps", |s| {
            s.parse().map_err(|e| format!("{e}"))
        }),
        filecfg::fill(&mut args.spacing, map, "spacing", parse_enum),
        filecfg::fill(&mut args.beta, map, "beta", parse_f64),
        filecfg::fill(&mut args.length, map, "length", parse_f64),
        filecfg::fill(&mut args.out, map, "out", |s| Ok(PathBuf::from(s))),
    ] {
        step.map_err(usage)?;
    }
    let n = args.n.ok_or_else(|| missing("--n"))?;
    let colors = args.colors.ok_or_else(|| missing("--colors"))?;
    let swept = args.sweep.ok_or_else(|| missing("--sweep"))?;
    let from = args.from.ok_or_else(|| missing("--from"))?;
    let to = args.to.ok_or_else(|| missing("--to"))?;
    let steps = args.steps.ok_or_else(|| missing("--steps"))?;
    let spacing = args.spacing.unwrap_or(SpacingArg::Linear);
    let out = args.out.ok_or_else(|| missing("--out"))?;
    let fixed = match swept {
        SweepParamArg::Length => {
            if args.length.is_some() {
                return Err(usage("--length conflicts with --sweep length"));
            }
            args.beta.ok_or_else(|| missing("--beta (fixed value)"))?
        }
        SweepParamArg::Beta => {
            if args.beta.is_some() {
                return Err(usage("--beta conflicts with --sweep beta"));
            }
            args.length.ok_or_else(|| missing("--length (fixed value)"))?
        }
    };
    let labels = colors.labels();
    ScenarioPair::new(n, labels, Statistics::Bose).map_err(classify)?;
    let grid = build_grid(from, to, steps, spacing)?;
    let rows: Vec<String> = grid
        .par_iter()
        .map(|&x| sweep_row(n, labels, swept, x, fixed))
        .collect::<Result<_, _>>()?;
    let mut csv = String::with_capacity(rows.len() * 140 + CSV_HEADER.len() + 1);
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    std::fs::write(&out, csv)
        .map_err(|e| usage(format!("cannot write {}: {e}", out.display())))?;
    Ok(ExitCode::SUCCESS)
}

fn build_grid(
    from: f64,
    to: f64,
    steps: usize,
    spacing: SpacingArg,
) -> Result<Vec<f64>, Failure> {
    if !(from.is_finite() && to.is_finite() && from > 0.0) {
        return Err(usage("grid bounds must be positive and finite"));
    }
    if from >= to {
        return Err(usage("--from must be strictly below --to"));
    }
    if steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| match spacing {
            SpacingArg::Linear => from + (to - from) * i as f64 / last,
            SpacingArg::Geometric => from * (to / from).powf(i as f64 / last),
        })
        .collect())
}

/// One CSV row. The bose/fermi columns follow the requested label mode; the
/// dist columns always come from the colored family, which is how the
/// non-identical reference curve is defined.
fn sweep_row(
    n: u32,
    labels: LabelMode,
    swept: SweepParamArg,
    x: f64,
    fixed: f64,
) -> Result<String, Failure> {
    let (beta, length) = match swept {
        SweepParamArg::Beta => (x, fixed),
        SweepParamArg::Length => (fixed, x),
    };
    let at_point = |e: CoreError| Failure::Numeric(format!("at grid point {}: {e}", sig12(x)));
    let config = PhysicalConfig::new(beta, length).map_err(at_point)?;
    let evaluate = |labels: LabelMode, stat: Statistics| -> Result<(f64, f64), Failure> {
        let pair = ScenarioPair::new(n, labels, stat).map_err(classify)?;
        let report = thermo::report(&pair, &config, DEFAULT_TOL).map_err(at_point)?;
        Ok((report.delta_s, report.work))
    };
    let (ds_b, w_b) = evaluate(labels, Statistics::Bose)?;
    let (ds_f, w_f) = evaluate(labels, Statistics::Fermi)?;
    let (ds_d, w_d) = evaluate(LabelMode::WithColors, Statistics::Distinguishable)?;
    let classical_ref = if n == 2 {
        2.0 * std::f64::consts::LN_2
    } else if labels == LabelMode::WithColors {
        f64::from(n) * std::f64::consts::LN_2
    } else {
        0.0
    };
    Ok(format!(
        "{},{},{},{},{},{},{},{}",
        sig12(x),
        sig12(ds_b),
        sig12(ds_f),
        sig12(ds_d),
        sig12(w_b),
        sig12(w_f),
        sig12(w_d),
        sig12(classical_ref)
    ))
}

fn run_verify(mut args: VerifyArgs, map: &HashMap<String, String>) -> Result<ExitCode, Failure> {
    for step in [
        filecfg::fill(&mut args.tol_scale, map, "tol-scale", parse_f64),
        filecfg::fill(&mut args.oracle_nmax, map, "oracle-nmax", |s| {
            s.parse().map_err(|e| format!("{e}"))
        }),
    ] {
        step.map_err(usage)?;
    }
    let tol_scale = args.tol_scale.unwrap_or(1.0);
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        return Err(usage("--tol-scale must be positive"));
    }
    let opts = VerifyOptions {
        tol_scale,
        oracle_cutoff: args.oracle_nmax.map_or(Cutoff::Auto, Cutoff::Fixed),
    };
    let report = run_full_suite(&opts);
    let mut out = String::new();
    for check in &report.checks {
        out.push_str(&format!(
            "{}  {:<40}  {}\n",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        ));
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", report.checks.len()));
    let io = write_stdout(&out);
    if report.all_passed() {
        Ok(io)
    } else {
        Ok(ExitCode::from(3))
    }
}
