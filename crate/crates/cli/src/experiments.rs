//! One runner per experiment kind. Each writes its tables into the output
//! directory and returns the values embedded in the summary.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use cqc_core::analysis::{
    collapse_metric, grover_detection, grover_rate, grover_transfer_scan, run_cascade,
    simulate_chain_curve,
};
use cqc_core::problems::{circuit_model, factoring_model, ChainProblem, FactoringProblem, GroverProblem};
use cqc_core::protocol::{CycleKernel, DirectKernel, Ensemble, SectorPropagator, GROUND_THRESHOLD};
use cqc_core::{run_ensemble, CoolingConfig, CoolingSimulator, EvolutionEngine, StateVector};

use crate::config::{
    ChainParams, CircuitParams, Experiment, ExperimentConfig, FactorParams, GroverParams, Initial,
    Propagator, SweepParams,
};
use crate::output::{float, write_summary, Table};
use crate::CliError;

/// Validates, runs and writes all outputs; returns the summary path.
pub fn run(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", cfg.out.display())))?;
    let pool = match cfg.threads {
        Some(t) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    let body = || -> Result<PathBuf, CliError> {
        let dir = cfg.out.as_path();
        match &cfg.experiment {
            Experiment::Chain(p) => {
                let (files, results) = chain(dir, p)?;
                write_summary(dir, cfg, files, results)
            }
            Experiment::Grover(p) => {
                let (files, results) = grover(dir, p)?;
                write_summary(dir, cfg, files, results)
            }
            Experiment::Factor(p) => {
                let (files, results) = factor(dir, p, cfg.seed)?;
                write_summary(dir, cfg, files, results)
            }
            Experiment::Circuit(p) => {
                let (files, results) = circuit(dir, p, cfg.seed)?;
                write_summary(dir, cfg, files, results)
            }
            Experiment::Sweep(p) => {
                let (files, results) = sweep(dir, p, cfg.seed)?;
                write_summary(dir, cfg, files, results)
            }
        }
    };
    match pool {
        Some(pool) => pool.install(body),
        None => body(),
    }
}

#[derive(Serialize)]
pub struct ChainCurveResult {
    pub n: usize,
    pub omega: f64,
    pub in_regime: bool,
    pub peak_tau: f64,
    pub peak_population: f64,
    pub population_at_tau_1: f64,
}

#[derive(Serialize)]
pub struct ChainResults {
    pub profile: String,
    pub lambda: f64,
    pub collapse_metric: f64,
    pub curves: Vec<ChainCurveResult>,
}

fn chain(dir: &Path, p: &ChainParams) -> Result<(Vec<String>, ChainResults), CliError> {
    let profile = cqc_core::problems::ChainProfile::from(p.profile);
    let mut files = Vec::new();
    let mut curves = Vec::new();
    let mut summaries = Vec::new();
    for &n in &p.n {
        let curve = simulate_chain_curve(&ChainProblem::new(n, profile)?, p.lambda, p.points)?;
        let omega = curve.prediction.omega;
        let mut table = Table::create(dir, &format!("chain_{profile}_n{n}.csv"), &["tau", "time", "population"])?;
        for (&tau, &pop) in curve.tau.iter().zip(&curve.population) {
            table.row(&[float(tau), float(tau * PI / omega), float(pop)])?;
        }
        files.push(table.finish()?);
        let (peak_tau, peak_population) = curve.peak();
        summaries.push(ChainCurveResult {
            n,
            omega,
            in_regime: curve.prediction.in_regime,
            peak_tau,
            peak_population,
            population_at_tau_1: curve.population_at(1.0),
        });
        curves.push(curve);
    }
    let metric = collapse_metric(&curves)?;
    info!("{profile} chains: collapse metric {metric:.4}");
    Ok((
        files,
        ChainResults {
            profile: profile.to_string(),
            lambda: p.lambda,
            collapse_metric: metric,
            curves: summaries,
        },
    ))
}

#[derive(Serialize)]
pub struct GroverRow {
    pub n_qubits: u32,
    pub solutions: usize,
    pub exact_rate: f64,
    pub approx_rate: f64,
    pub predicted_time: f64,
    pub measured_time: f64,
    pub relative_error: f64,
    pub peak_detection: f64,
    pub detection_at_predicted: f64,
}

#[derive(Serialize)]
pub struct GroverResults {
    pub lambda: f64,
    pub rows: Vec<GroverRow>,
    /// Measured time ratios between successive register sizes, per solution
    /// count; 2^{N/2} scaling gives √2.
    pub successive_ratios: Vec<(usize, u32, f64)>,
}

fn grover(dir: &Path, p: &GroverParams) -> Result<(Vec<String>, GroverResults), CliError> {
    let engine = EvolutionEngine::krylov(1e-12, 40);
    let mut rates = Table::create(
        dir,
        "grover_rates.csv",
        &[
            "n_qubits",
            "solutions",
            "exact_rate",
            "approx_rate",
            "predicted_time",
            "measured_time",
            "relative_error",
            "peak_detection",
            "detection_at_predicted",
        ],
    )?;
    let mut scans = Table::create(dir, "grover_scan.csv", &["n_qubits", "solutions", "time", "detection"])?;
    let mut rows = Vec::new();
    let mut n_sorted = p.n_qubits.clone();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    for &n0 in &p.solutions {
        for &n in &n_sorted {
            let problem = GroverProblem::with_count(n, n0)?;
            let rate = grover_rate(n, n0, p.lambda)?;
            let predicted = rate.transfer_time();
            let scan = grover_transfer_scan(&problem, p.lambda, p.scan_span * predicted, p.scan_steps, &engine)?;
            let at_predicted = grover_detection(&problem, p.lambda, predicted, &engine)?;
            for (&t, &d) in scan.times.iter().zip(&scan.detection) {
                scans.row(&[n.to_string(), n0.to_string(), float(t), float(d)])?;
            }
            let row = GroverRow {
                n_qubits: n,
                solutions: n0,
                exact_rate: rate.exact,
                approx_rate: rate.approx,
                predicted_time: predicted,
                measured_time: scan.first_peak_time,
                relative_error: scan.first_peak_time / predicted - 1.0,
                peak_detection: scan.first_peak_detection,
                detection_at_predicted: at_predicted,
            };
            rates.row(&[
                n.to_string(),
                n0.to_string(),
                float(row.exact_rate),
                float(row.approx_rate),
                float(row.predicted_time),
                float(row.measured_time),
                float(row.relative_error),
                float(row.peak_detection),
                float(row.detection_at_predicted),
            ])?;
            info!("N={n} n0={n0}: transfer {:.2} vs predicted {predicted:.2}", row.measured_time);
            rows.push(row);
        }
    }
    let successive_ratios = rows
        .windows(2)
        .filter(|w| w[0].solutions == w[1].solutions && w[1].n_qubits == w[0].n_qubits + 1)
        .map(|w| (w[0].solutions, w[0].n_qubits, w[1].measured_time / w[0].measured_time))
        .collect();
    Ok((
        vec![rates.finish()?, scans.finish()?],
        GroverResults {
            lambda: p.lambda,
            rows,
            successive_ratios,
        },
    ))
}

#[derive(Serialize)]
pub struct EnsembleResults {
    pub lambda: f64,
    pub cycle_duration: f64,
    pub dimension: usize,
    pub ground_manifold: Vec<usize>,
    pub trajectory_seeds: Vec<u64>,
    pub final_mean_energy: f64,
    pub final_ground_fraction: f64,
    /// Trajectories whose ground population reached the threshold at some cycle.
    pub reached_ground_fraction: f64,
    /// Cycles in which ⟨H_P⟩ rose by more than λ, over all cycles run.
    pub heating_fraction: f64,
}

struct EnsembleSetup {
    z: u32,
    alpha0: bool,
    modes: usize,
    lambda: f64,
    duration: f64,
    rotating_wave: bool,
    propagator: Propagator,
    cooling: CoolingConfig,
    samples: usize,
}

fn factoring_ensemble(s: &EnsembleSetup) -> Result<(Ensemble, EnsembleResults), CliError> {
    let spec = factoring_model(&FactoringProblem::new(s.z)?, s.modes, s.lambda, s.alpha0)?
        .with_rotating_wave(s.rotating_wave);
    let h = spec.assemble()?;
    info!("factoring model: dimension {}, {} nonzeros", h.dim(), h.nnz());
    fn go<K: CycleKernel>(sim: CoolingSimulator<K>, s: &EnsembleSetup, dim: usize) -> Result<(Ensemble, EnsembleResults), CliError> {
        let ens = run_ensemble(&sim, &s.cooling, s.samples, None)?;
        let (mut rises, mut total) = (0usize, 0usize);
        for t in &ens.trajectories {
            let mut prev = t.initial_energy;
            for o in &t.outcomes {
                rises += (o.post_energy > prev + s.lambda) as usize;
                total += 1;
                prev = o.post_energy;
            }
        }
        let last = ens.stats.cycles();
        let results = EnsembleResults {
            lambda: s.lambda,
            cycle_duration: s.duration,
            dimension: dim,
            ground_manifold: sim.ground().to_vec(),
            trajectory_seeds: ens.trajectories.iter().map(|t| t.seed).collect(),
            final_mean_energy: ens.stats.mean_energy[last],
            final_ground_fraction: ens.stats.ground_fraction[last],
            reached_ground_fraction: ens.reached_ground_by(usize::MAX, GROUND_THRESHOLD),
            heating_fraction: if total == 0 { 0.0 } else { rises as f64 / total as f64 },
        };
        Ok((ens, results))
    }
    match s.propagator {
        Propagator::Sector => {
            info!("building sector propagator");
            let kernel = SectorPropagator::build(&h, spec.layout(), s.duration, &EvolutionEngine::chebyshev(1e-10))?;
            go(CoolingSimulator::new(kernel, &spec.problem)?, s, h.dim())
        }
        Propagator::Direct => {
            let kernel = DirectKernel::new(&h, spec.layout(), s.duration, &EvolutionEngine::krylov(1e-10, 40))?;
            go(CoolingSimulator::new(kernel, &spec.problem)?, s, h.dim())
        }
    }
}

fn cooling(duration: f64, cycles: usize, quiet: usize, seed: u64, initial: Initial) -> CoolingConfig {
    CoolingConfig {
        cycle_duration: duration,
        max_cycles: cycles,
        quiet_cycles_to_stop: quiet,
        seed,
        initial_state: initial.into(),
    }
}

const ENSEMBLE_HEADER: &[&str] = &[
    "cycle",
    "mean_energy",
    "min_energy",
    "q10_energy",
    "median_energy",
    "q90_energy",
    "max_energy",
    "mean_ground_population",
    "ground_fraction",
    "detection_fraction",
];

fn factor(dir: &Path, p: &FactorParams, seed: u64) -> Result<(Vec<String>, EnsembleResults), CliError> {
    let duration = p.duration.unwrap_or(PI / (2.0 * p.lambda));
    let setup = EnsembleSetup {
        z: p.z,
        alpha0: p.alpha0,
        modes: p.modes,
        lambda: p.lambda,
        duration,
        rotating_wave: p.rotating_wave,
        propagator: p.propagator,
        cooling: cooling(duration, p.cycles, p.quiet_cycles, seed, p.initial),
        samples: p.samples,
    };
    let (ens, results) = factoring_ensemble(&setup)?;
    let s = &ens.stats;
    let mut table = Table::create(dir, "factor_ensemble.csv", ENSEMBLE_HEADER)?;
    for k in 0..=s.cycles() {
        table.row(&[
            k.to_string(),
            float(s.mean_energy[k]),
            float(s.min_energy[k]),
            float(s.q10_energy[k]),
            float(s.median_energy[k]),
            float(s.q90_energy[k]),
            float(s.max_energy[k]),
            float(s.mean_ground_population[k]),
            float(s.ground_fraction[k]),
            float(s.detection_fraction[k]),
        ])?;
    }
    let mut traj = Table::create(
        dir,
        "factor_trajectories.csv",
        &["trajectory", "seed", "cycle", "detected_mask", "post_energy", "ground_population"],
    )?;
    for (i, t) in ens.trajectories.iter().take(p.keep_trajectories).enumerate() {
        traj.row(&[
            i.to_string(),
            t.seed.to_string(),
            "0".into(),
            "0".into(),
            float(t.initial_energy),
            float(t.initial_ground_population),
        ])?;
        for (k, o) in t.outcomes.iter().enumerate() {
            traj.row(&[
                i.to_string(),
                t.seed.to_string(),
                (k + 1).to_string(),
                o.detected.to_string(),
                float(o.post_energy),
                float(o.ground_population),
            ])?;
        }
    }
    info!(
        "final mean energy {:.3}, reached ground {:.1}%",
        results.final_mean_energy,
        100.0 * results.reached_ground_fraction
    );
    Ok((vec![table.finish()?, traj.finish()?], results))
}

fn sweep(dir: &Path, p: &SweepParams, seed: u64) -> Result<(Vec<String>, Vec<EnsembleResults>), CliError> {
    let mut table = Table::create(
        dir,
        "sweep.csv",
        &["lambda", "cycle", "mean_energy", "mean_ground_population", "ground_fraction", "detection_fraction"],
    )?;
    let mut all = Vec::new();
    for &lambda in &p.lambdas {
        let duration = PI / (2.0 * lambda);
        let setup = EnsembleSetup {
            z: p.z,
            alpha0: p.alpha0,
            modes: p.modes,
            lambda,
            duration,
            rotating_wave: p.rotating_wave,
            propagator: p.propagator,
            cooling: cooling(duration, p.cycles, 0, seed, Initial::Random),
            samples: p.samples,
        };
        info!("sweep point lambda = {lambda}");
        let (ens, results) = factoring_ensemble(&setup)?;
        let s = &ens.stats;
        for k in 0..=s.cycles() {
            table.row(&[
                float(lambda),
                k.to_string(),
                float(s.mean_energy[k]),
                float(s.mean_ground_population[k]),
                float(s.ground_fraction[k]),
                float(s.detection_fraction[k]),
            ])?;
        }
        all.push(results);
    }
    Ok((vec![table.finish()?], all))
}

#[derive(Serialize)]
pub struct CircuitResults {
    pub n_qubits: usize,
    pub steps: usize,
    pub dimension: usize,
    pub cycles_to_complete: Option<usize>,
    pub detections: usize,
    pub fidelity: f64,
    pub heating_events: Vec<(usize, usize)>,
}

fn circuit(dir: &Path, p: &CircuitParams, seed: u64) -> Result<(Vec<String>, CircuitResults), CliError> {
    let c = p.compile()?;
    let spec = circuit_model(&c, p.lambda)?;
    let h = spec.assemble()?;
    let kernel = DirectKernel::new(&h, spec.layout(), PI / (2.0 * p.lambda), &EvolutionEngine::default())?;
    let sim = CoolingSimulator::new(kernel, &spec.problem)?;
    let input = StateVector::basis(c.program_dim(), p.input)?;
    let run = run_cascade(&sim, &c, &input, seed, p.max_cycles.unwrap_or(20 * c.steps()))?;
    let mut header = vec!["cycle".to_string(), "detected_mask".to_string()];
    header.extend((0..c.clock_dim()).map(|t| format!("clock_{t}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::create(dir, "circuit_clock.csv", &header)?;
    let mut first = vec!["0".to_string(), "0".to_string(), float(1.0)];
    first.extend((1..c.clock_dim()).map(|_| float(0.0)));
    table.row(&first)?;
    for step in &run.steps {
        let mut row = vec![step.cycle.to_string(), step.detected.to_string()];
        row.extend(step.clock_populations.iter().map(|&v| float(v)));
        table.row(&row)?;
    }
    info!("circuit fidelity {:.6} after {} detections", run.fidelity, run.detections);
    Ok((
        vec![table.finish()?],
        CircuitResults {
            n_qubits: c.n_qubits(),
            steps: c.steps(),
            dimension: h.dim(),
            cycles_to_complete: run.cycles_to_complete,
            detections: run.detections,
            fidelity: run.fidelity,
            heating_events: run.heating_events,
        },
    ))
}
