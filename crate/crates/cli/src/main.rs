use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cqc_cli::config::{
    ChainParams, CircuitParams, Experiment, ExperimentConfig, FactorParams, GroverParams, Initial,
    Profile, Propagator, SweepParams, DEFAULT_OUT,
};
use cqc_cli::{experiments, CliError};

/// Cooling-based quantum computation experiments.
///
/// Every run writes CSV tables and a summary.json into --out. Passing the
/// summary back with --config reruns the same experiment.
#[derive(Parser)]
#[command(name = "cqc", version)]
struct Cli {
    /// JSON config file, or a summary.json from an earlier run.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on the count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Population transfer along flat or triangle chains, rescaled by the predicted rate.
    Chain(ChainFlags),
    /// Transfer time and detection probability of the search model.
    Grover(GroverFlags),
    /// Cooling ensemble for the factoring cost function.
    Factor(FactorFlags),
    /// Clock cascade of a compiled circuit.
    Circuit(CircuitFlags),
    /// Factoring ensembles over a list of couplings.
    Sweep(SweepFlags),
    /// Print the JSON schema of config files.
    Schema,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Flat,
    Triangle,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Flat => Profile::Flat,
            ProfileArg::Triangle => Profile::Triangle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PropagatorArg {
    Sector,
    Direct,
}

impl From<PropagatorArg> for Propagator {
    fn from(p: PropagatorArg) -> Self {
        match p {
            PropagatorArg::Sector => Propagator::Sector,
            PropagatorArg::Direct => Propagator::Direct,
        }
    }
}

#[derive(Args)]
struct ChainFlags {
    #[arg(long)]
    profile: Option<ProfileArg>,
    /// Comma-separated chain orders.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct GroverFlags {
    /// Comma-separated register sizes N.
    #[arg(long = "n-qubits", visible_alias = "n", value_delimiter = ',')]
    n_qubits: Option<Vec<u32>>,
    /// Comma-separated solution counts n0.
    #[arg(long, visible_alias = "n0", value_delimiter = ',')]
    solutions: Option<Vec<usize>>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    scan_steps: Option<usize>,
    #[arg(long)]
    scan_span: Option<f64>,
}

fn parse_alpha0(s: &str) -> Result<bool, String> {
    match s {
        "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        _ => Err(format!("expected 0 or 1, got '{s}'")),
    }
}

fn parse_initial(s: &str) -> Result<Initial, String> {
    match s {
        "random" => Ok(Initial::Random),
        "uniform" => Ok(Initial::Uniform),
        _ => s
            .parse()
            .map(Initial::Basis)
            .map_err(|_| format!("expected random, uniform or a basis index, got '{s}'")),
    }
}

#[derive(Args)]
struct FactorFlags {
    /// Product to factor, below 64.
    #[arg(long)]
    z: Option<u32>,
    #[arg(long, value_parser = parse_alpha0)]
    alpha0: Option<bool>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Cycle duration; defaults to pi/(2 lambda).
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    cycles: Option<usize>,
    /// random, uniform, or a basis index.
    #[arg(long, value_parser = parse_initial)]
    initial: Option<Initial>,
    #[arg(long)]
    quiet_cycles: Option<usize>,
    /// Keep only energy-conserving cavity hops.
    #[arg(long)]
    rotating_wave: bool,
    #[arg(long)]
    propagator: Option<PropagatorArg>,
    #[arg(long)]
    keep_trajectories: Option<usize>,
}

#[derive(Args)]
struct CircuitFlags {
    /// JSON list of {"gate", "targets"} entries.
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    n_qubits: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Program basis state to start from.
    #[arg(long)]
    input: Option<usize>,
    #[arg(long)]
    max_cycles: Option<usize>,
}

#[derive(Args)]
struct SweepFlags {
    /// Comma-separated couplings.
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long)]
    z: Option<u32>,
    #[arg(long, value_parser = parse_alpha0)]
    alpha0: Option<bool>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long)]
    rotating_wave: bool,
    #[arg(long)]
    propagator: Option<PropagatorArg>,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn missing(what: &str) -> CliError {
    CliError::Validation(format!("{what} is required (flag or config file)"))
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let base = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let kind = match &cli.command {
        Command::Chain(_) => "chain",
        Command::Grover(_) => "grover",
        Command::Factor(_) => "factor",
        Command::Circuit(_) => "circuit",
        Command::Sweep(_) => "sweep",
        Command::Schema => unreachable!("handled before resolution"),
    };
    if let Some(b) = &base {
        if b.experiment.kind() != kind {
            return Err(CliError::Validation(format!(
                "config describes a '{}' experiment, not '{kind}'",
                b.experiment.kind()
            )));
        }
    }
    let prior = base.as_ref().map(|b| &b.experiment);
    let experiment = match cli.command {
        Command::Chain(f) => {
            let mut p = match prior {
                Some(Experiment::Chain(p)) => p.clone(),
                _ => ChainParams {
                    profile: f.profile.map(Profile::from).ok_or_else(|| missing("--profile"))?,
                    n: f.n.clone().ok_or_else(|| missing("--n"))?,
                    lambda: 0.1,
                    points: cqc_core::analysis::DEFAULT_CURVE_POINTS,
                },
            };
            set(&mut p.profile, f.profile.map(Profile::from));
            set(&mut p.n, f.n);
            set(&mut p.lambda, f.lambda);
            set(&mut p.points, f.points);
            Experiment::Chain(p)
        }
        Command::Grover(f) => {
            let mut p = match prior {
                Some(Experiment::Grover(p)) => p.clone(),
                _ => GroverParams {
                    n_qubits: vec![4, 5, 6, 7, 8, 9, 10],
                    solutions: vec![1, 2, 4],
                    lambda: 0.004,
                    scan_steps: 600,
                    scan_span: 1.5,
                },
            };
            set(&mut p.n_qubits, f.n_qubits);
            set(&mut p.solutions, f.solutions);
            set(&mut p.lambda, f.lambda);
            set(&mut p.scan_steps, f.scan_steps);
            set(&mut p.scan_span, f.scan_span);
            Experiment::Grover(p)
        }
        Command::Factor(f) => {
            let mut p = match prior {
                Some(Experiment::Factor(p)) => p.clone(),
                _ => FactorParams::default(),
            };
            set(&mut p.z, f.z);
            set(&mut p.alpha0, f.alpha0);
            set(&mut p.modes, f.modes);
            set(&mut p.lambda, f.lambda);
            if f.duration.is_some() {
                p.duration = f.duration;
            }
            set(&mut p.samples, f.samples);
            set(&mut p.cycles, f.cycles);
            set(&mut p.initial, f.initial);
            set(&mut p.quiet_cycles, f.quiet_cycles);
            p.rotating_wave |= f.rotating_wave;
            set(&mut p.propagator, f.propagator.map(Into::into));
            set(&mut p.keep_trajectories, f.keep_trajectories);
            Experiment::Factor(p)
        }
        Command::Circuit(f) => {
            let file_gates = f.circuit.as_deref().map(CircuitParams::read_gates).transpose()?;
            let mut p = match prior {
                Some(Experiment::Circuit(p)) => p.clone(),
                _ => CircuitParams {
                    gates: file_gates.clone().ok_or_else(|| missing("--circuit"))?,
                    n_qubits: None,
                    lambda: 0.02,
                    input: 0,
                    max_cycles: None,
                },
            };
            set(&mut p.gates, file_gates);
            if f.n_qubits.is_some() {
                p.n_qubits = f.n_qubits;
            }
            set(&mut p.lambda, f.lambda);
            set(&mut p.input, f.input);
            if f.max_cycles.is_some() {
                p.max_cycles = f.max_cycles;
            }
            Experiment::Circuit(p)
        }
        Command::Sweep(f) => {
            let mut p = match prior {
                Some(Experiment::Sweep(p)) => p.clone(),
                _ => {
                    let d = FactorParams::default();
                    SweepParams {
                        lambdas: f.lambdas.clone().ok_or_else(|| missing("--lambdas"))?,
                        z: d.z,
                        alpha0: d.alpha0,
                        modes: d.modes,
                        samples: d.samples,
                        cycles: d.cycles,
                        rotating_wave: false,
                        propagator: d.propagator,
                    }
                }
            };
            set(&mut p.lambdas, f.lambdas);
            set(&mut p.z, f.z);
            set(&mut p.alpha0, f.alpha0);
            set(&mut p.modes, f.modes);
            set(&mut p.samples, f.samples);
            set(&mut p.cycles, f.cycles);
            p.rotating_wave |= f.rotating_wave;
            set(&mut p.propagator, f.propagator.map(Into::into));
            Experiment::Sweep(p)
        }
        Command::Schema => unreachable!(),
    };
    let base_seed = base.as_ref().map_or(0, |b| b.seed);
    let base_threads = base.as_ref().and_then(|b| b.threads);
    let base_out = base.map_or_else(|| PathBuf::from(DEFAULT_OUT), |b| b.out);
    Ok(ExperimentConfig {
        seed: cli.seed.unwrap_or(base_seed),
        threads: cli.threads.or(base_threads),
        out: cli.out.unwrap_or(base_out),
        experiment,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if matches!(cli.command, Command::Schema) {
        println!("{}", serde_json::to_string_pretty(&cqc_cli::config::schema()).expect("schema serializes"));
        return ExitCode::SUCCESS;
    }
    let result = resolve(cli).and_then(|cfg| experiments::run(&cfg));
    match result {
        Ok(summary) => {
            println!("{}", summary.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cqc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
