//! `swipt-re`: trace rate-energy tradeoff regions from the command line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver
//! non-convergence, 4 infeasible constraint.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use swipt_cli::config::{matrix_to_literal, ChannelSource, MatrixLiteral, ScenarioConfig};
use swipt_cli::generate_rayleigh_channel;
use swipt_cli::runner::{run_scenario, RunError};
use swipt_core::solvers::colocated::harvest_constrained_rate_colocated;
use swipt_core::solvers::tradeoff::harvest_constrained_rate;
use swipt_core::solvers::DEFAULT_TOL;
use swipt_core::Error as CoreError;

const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_INFEASIBLE: u8 = 4;

/// Built-in scenario presets, runnable by bare name.
const PRESETS: &[(&str, &str)] = &[
    ("fig4", include_str!("../presets/fig4.json")),
    ("fig5", include_str!("../presets/fig5.json")),
    ("fig6", include_str!("../presets/fig6.json")),
    ("fig7", include_str!("../presets/fig7.json")),
];

#[derive(Parser)]
#[command(
    name = "swipt-re",
    about = "Rate-energy tradeoff regions for simultaneous wireless information and power transfer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config (a JSON file path or a preset name like
    /// `fig6`), writing one CSV per scheme plus a manifest.
    Run(RunArgs),
    /// Solve one harvest-constrained rate maximization and print the
    /// solution as JSON.
    SolveP3(SolveArgs),
    /// Generate a seeded Rayleigh channel matrix and print it as JSON.
    GenChannel(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file path or preset name (fig4, fig5, fig6, fig7).
    config: String,
    /// Output directory for CSVs and the manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    /// JSON file holding the channel source (same schema as the
    /// `channel` field of a scenario config).
    #[arg(long)]
    channel: PathBuf,
    /// Transmit power budget.
    #[arg(long)]
    power: f64,
    /// Harvested-power floor.
    #[arg(long)]
    qbar: f64,
    /// Dual convergence tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct GenArgs {
    /// Transmit antennas (matrix columns).
    #[arg(long)]
    m: usize,
    /// Receive antennas (matrix rows).
    #[arg(long)]
    n: usize,
    /// Per-element variance.
    #[arg(long)]
    var: f64,
    /// RNG seed.
    #[arg(long)]
    seed: u64,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args),
        Command::SolveP3(args) => solve_p3(args),
        Command::GenChannel(args) => gen_channel(args),
    }
}

/// `SWIPT_RE_THREADS` caps the worker count; 0 or unset means automatic.
fn configure_threads() {
    if let Ok(value) = std::env::var("SWIPT_RE_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => eprintln!("warning: ignoring non-numeric SWIPT_RE_THREADS={value}"),
        }
    }
}

fn load_config(name_or_path: &str) -> Result<ScenarioConfig, String> {
    let path = PathBuf::from(name_or_path);
    let text = if path.exists() {
        fs::read_to_string(&path).map_err(|e| format!("cannot read {name_or_path}: {e}"))?
    } else if let Some((_, preset)) = PRESETS.iter().find(|(n, _)| *n == name_or_path) {
        (*preset).to_string()
    } else {
        return Err(format!(
            "`{name_or_path}` is neither a readable file nor a preset name ({})",
            PRESETS
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", ")
        ));
    };
    ScenarioConfig::from_json(&text)
}

fn run(args: RunArgs) -> ExitCode {
    let config = match load_config(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run_scenario(&config, &args.out) {
        Ok(summary) => {
            println!(
                "wrote {} scheme file(s) and {}",
                summary.csv_paths.len(),
                summary.manifest_path.display()
            );
            if summary.all_converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("warning: some sweep points did not converge (see manifest)");
                ExitCode::from(EXIT_NOT_CONVERGED)
            }
        }
        Err(RunError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(RunError::Infeasible(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
    }
}

#[derive(Serialize)]
struct SolutionReport {
    rate: f64,
    harvested: f64,
    trace: f64,
    lambda: Option<f64>,
    mu: Option<f64>,
    iterations: usize,
    converged: bool,
}

fn solve_p3(args: SolveArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.channel) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.channel.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let source: ChannelSource = match serde_json::from_str(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: channel parse error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let probe = ScenarioConfig {
        channel: source,
        power: args.power,
        zeta: 1.0,
        peak_power: None,
        noise_split: None,
        schemes: vec!["separated".into()],
        sweep: Default::default(),
        rho_points: 51,
        physical_units: None,
    };
    let channels = match probe.resolve() {
        Ok(r) => r.channels,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let result = if channels.is_colocated() {
        harvest_constrained_rate_colocated(&channels, args.power, args.qbar, args.tol)
    } else {
        harvest_constrained_rate(&channels, args.power, args.qbar, args.tol)
    };
    match result {
        Ok(sol) => {
            let report = SolutionReport {
                rate: sol.rate,
                harvested: sol.harvested,
                trace: sol.covariance.trace(),
                lambda: sol.dual.map(|d| d.lambda),
                mu: sol.dual.map(|d| d.mu),
                iterations: sol.iterations,
                converged: sol.converged,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            if sol.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_NOT_CONVERGED)
            }
        }
        Err(e @ CoreError::InfeasibleHarvest { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

#[derive(Serialize)]
struct ChannelReport {
    m: usize,
    n: usize,
    variance: f64,
    seed: u64,
    matrix: MatrixLiteral,
}

fn gen_channel(args: GenArgs) -> ExitCode {
    if args.m == 0 || args.n == 0 || !(args.var > 0.0) {
        eprintln!("error: need m > 0, n > 0, var > 0");
        return ExitCode::from(EXIT_CONFIG);
    }
    let matrix = generate_rayleigh_channel(args.m, args.n, args.var, args.seed);
    let report = ChannelReport {
        m: args.m,
        n: args.n,
        variance: args.var,
        seed: args.seed,
        matrix: matrix_to_literal(&matrix),
    };
    let body = serde_json::to_string_pretty(&report).unwrap();
    match args.out {
        Some(path) => {
            if let Err(e) = fs::write(&path, body + "\n") {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_CONFIG);
            }
        }
        None => println!("{body}"),
    }
    ExitCode::SUCCESS
}
