use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aoi_cli::commands;
use aoi_cli::error::CliError;
use aoi_cli::experiments;
use aoi_cli::spec::{
    AnalyzeAlohaSpec, AnalyzeSfSpec, ApproxCdfSpec, ExperimentSpec, OptimizeSSpec,
    OptimizeTauSpec, ProtocolKind, ScatterSpec, SimulateSpec, SweepSpec, SymmetricSpec,
    TauMethodKind, TauStart,
};

/// Age-of-information analysis for slotted multiaccess channels.
///
/// Node indices in all output are 1-based. Outputs are CSV with '#' comment
/// lines carrying the tool version, the resolved parameter document, and the
/// seed; identical inputs produce byte-identical files. AOI_THREADS caps
/// experiment parallelism. Exit codes: 0 success, 2 invalid input, 3
/// numerical failure, 4 i/o error.
#[derive(Parser)]
#[command(name = "aoi", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form analysis of scheduled access with feedback.
    AnalyzeSf(AnalyzeSfArgs),
    /// Closed-form analysis of slotted random access.
    AnalyzeAloha(AnalyzeAlohaArgs),
    /// Sweep the turn cap and report the age-minimizing value.
    OptimizeS(OptimizeSArgs),
    /// Optimize random-access attempt probabilities.
    OptimizeTau(OptimizeTauArgs),
    /// Symmetric updating: equal-age operating points of both protocols.
    Symmetric(SymmetricArgs),
    /// Monte Carlo simulation of either protocol.
    Simulate(SimulateArgs),
    /// Canned experiments emitting reproducible CSV data files.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

fn parse_spec_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

/// Resolve a command's parameters from --spec or from quick-use flags.
fn resolve<T, F>(spec: &Option<PathBuf>, quick: F) -> Result<T, CliError>
where
    T: serde::de::DeserializeOwned,
    F: FnOnce() -> Result<T, CliError>,
{
    match spec {
        Some(path) => parse_spec_file(path),
        None => quick(),
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::validation(format!("missing {flag} (or use --spec FILE)")))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(CliError::from),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[derive(Args)]
struct AnalyzeSfArgs {
    /// JSON parameter document; replaces the quick-use flags.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Per-node decode probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Turn cap (slots per turn).
    #[arg(long = "S")]
    s: Option<u32>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeAlohaArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Per-node attempt probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeSArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Largest turn cap to evaluate.
    #[arg(long)]
    s_max: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Numeric,
    Approx,
    Exact2,
}

#[derive(Clone, Copy, ValueEnum)]
enum StartArg {
    Approx,
    Uniform,
    Both,
}

#[derive(Args)]
struct OptimizeTauArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Solution method: the fixed-point solver, the closed-form
    /// approximation, or the exact two-node form.
    #[arg(long, value_enum, default_value = "numeric")]
    method: MethodArg,
    /// Solver starting point; `both` runs both and reports discrepancies.
    #[arg(long, value_enum, default_value = "approx")]
    start: StartArg,
    /// Solver tolerance on the stationarity max-residual.
    #[arg(long, default_value_t = aoi_core::optimize::TAU_DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = aoi_core::optimize::TAU_DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SymmetricArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Sf,
    Aloha,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolArg>,
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Turn cap (scheduled protocol).
    #[arg(long = "S")]
    s: Option<u32>,
    /// Attempt probabilities (random access).
    #[arg(long, value_delimiter = ',')]
    tau: Option<Vec<f64>>,
    /// Slots to simulate.
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent replications (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    replications: u32,
    /// Write a per-update trace CSV (node, slot, z) to this path.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Per-node moments and ages across turn caps for one profile.
    SSweep {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        #[arg(long)]
        s_max: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Symmetric ages of many random networks plus the fitted ratio.
    Scatter {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        networks: Option<u32>,
        #[arg(long)]
        nodes: Option<u32>,
        #[arg(long, default_value_t = 0.1)]
        p_low: f64,
        #[arg(long, default_value_t = 0.9)]
        p_high: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error distribution of the closed-form attempt probabilities.
    ApproxCdf {
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Network sizes, comma separated.
        #[arg(long = "m", value_delimiter = ',')]
        m_values: Option<Vec<u32>>,
        #[arg(long)]
        samples: Option<u32>,
        #[arg(long, default_value_t = 0.0)]
        p_low: f64,
        #[arg(long, default_value_t = 1.0)]
        p_high: f64,
        #[arg(long, default_value_t = 1e-6)]
        min_p: f64,
        #[arg(long, default_value_t = aoi_core::optimize::TAU_DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = aoi_core::optimize::TAU_DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::AnalyzeSf(args) => {
            let spec: AnalyzeSfSpec = resolve(&args.spec, || {
                Ok(AnalyzeSfSpec {
                    p: require(args.p.clone(), "--p")?,
                    s: require(args.s, "--S")?,
                })
            })?;
            emit(&args.out, &commands::analyze_sf(&spec)?)
        }
        Command::AnalyzeAloha(args) => {
            let spec: AnalyzeAlohaSpec = resolve(&args.spec, || {
                Ok(AnalyzeAlohaSpec {
                    p: require(args.p.clone(), "--p")?,
                    tau: require(args.tau.clone(), "--tau")?,
                })
            })?;
            emit(&args.out, &commands::analyze_aloha(&spec)?)
        }
        Command::OptimizeS(args) => {
            let spec: OptimizeSSpec = resolve(&args.spec, || {
                Ok(OptimizeSSpec {
                    p: require(args.p.clone(), "--p")?,
                    s_max: require(args.s_max, "--s-max")?,
                })
            })?;
            emit(&args.out, &commands::optimize_s(&spec)?)
        }
        Command::OptimizeTau(args) => {
            let spec: OptimizeTauSpec = resolve(&args.spec, || {
                Ok(OptimizeTauSpec {
                    p: require(args.p.clone(), "--p")?,
                    method: match args.method {
                        MethodArg::Numeric => TauMethodKind::Numeric,
                        MethodArg::Approx => TauMethodKind::Approx,
                        MethodArg::Exact2 => TauMethodKind::Exact2,
                    },
                    start: match args.start {
                        StartArg::Approx => TauStart::Approx,
                        StartArg::Uniform => TauStart::Uniform,
                        StartArg::Both => TauStart::Both,
                    },
                    tol: args.tol,
                    max_iter: args.max_iter,
                })
            })?;
            emit(&args.out, &commands::optimize_tau(&spec)?)
        }
        Command::Symmetric(args) => {
            let spec: SymmetricSpec = resolve(&args.spec, || {
                Ok(SymmetricSpec { p: require(args.p.clone(), "--p")? })
            })?;
            emit(&args.out, &commands::symmetric(&spec)?)
        }
        Command::Simulate(args) => {
            let spec: SimulateSpec = resolve(&args.spec, || {
                Ok(SimulateSpec {
                    protocol: match require(args.protocol, "--protocol")? {
                        ProtocolArg::Sf => ProtocolKind::Sf,
                        ProtocolArg::Aloha => ProtocolKind::Aloha,
                    },
                    p: require(args.p.clone(), "--p")?,
                    s: args.s,
                    tau: args.tau.clone(),
                    horizon: require(args.horizon, "--horizon")?,
                    seed: args.seed,
                    replications: args.replications,
                    trace: args.trace.as_ref().map(|t| t.display().to_string()),
                })
            })?;
            let output = commands::simulate_cmd(&spec)?;
            if let (Some(path), Some(trace)) = (&spec.trace, &output.trace) {
                std::fs::write(path, trace)?;
            }
            emit(&args.out, &output.csv)
        }
        Command::Experiment(which) => {
            let (spec, out) = match which {
                ExperimentCommand::SSweep { spec, p, s_max, out } => (
                    resolve(&spec, || {
                        Ok(ExperimentSpec::SSweep(SweepSpec {
                            p: require(p.clone(), "--p")?,
                            s_max: require(s_max, "--s-max")?,
                            output: None,
                        }))
                    })?,
                    out,
                ),
                ExperimentCommand::Scatter { spec, networks, nodes, p_low, p_high, seed, out } => (
                    resolve(&spec, || {
                        Ok(ExperimentSpec::Scatter(ScatterSpec {
                            networks: require(networks, "--networks")?,
                            nodes: require(nodes, "--nodes")?,
                            p_low,
                            p_high,
                            seed,
                            output: None,
                        }))
                    })?,
                    out,
                ),
                ExperimentCommand::ApproxCdf {
                    spec,
                    m_values,
                    samples,
                    p_low,
                    p_high,
                    min_p,
                    tol,
                    max_iter,
                    seed,
                    out,
                } => (
                    resolve(&spec, || {
                        Ok(ExperimentSpec::ApproxCdf(ApproxCdfSpec {
                            m_values: require(m_values.clone(), "--m")?,
                            samples: require(samples, "--samples")?,
                            p_low,
                            p_high,
                            min_p,
                            tol,
                            max_iter,
                            seed,
                            output: None,
                        }))
                    })?,
                    out,
                ),
            };
            let csv = experiments::run(&spec)?;
            let target = out.or_else(|| spec.output().map(PathBuf::from));
            emit(&target, &csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aoi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
