//! Independent trajectories from split seeds, and their per-cycle aggregates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CoolingConfig, CoolingSimulator, CycleKernel, Trajectory};
use crate::error::{Error, Result};

/// Ground population above which a trajectory counts as having reached the ground manifold.
pub const GROUND_THRESHOLD: f64 = 0.9;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trajectory `index`: `mix64(master + (index + 1) · 0x9E3779B97F4A7C15)`,
/// the `index + 1`-th output of a SplitMix64 stream started at `master`.
pub fn trajectory_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Per-cycle aggregates. Index 0 is the start state, index k the state after
/// cycle k. Trajectories that stopped early contribute their last record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub samples: usize,
    pub mean_energy: Vec<f64>,
    pub min_energy: Vec<f64>,
    pub max_energy: Vec<f64>,
    pub q10_energy: Vec<f64>,
    pub median_energy: Vec<f64>,
    pub q90_energy: Vec<f64>,
    pub mean_ground_population: Vec<f64>,
    /// Fraction of trajectories with ground population ≥ [`GROUND_THRESHOLD`].
    pub ground_fraction: Vec<f64>,
    /// Fraction of trajectories that detected at least one photon in the cycle.
    pub detection_fraction: Vec<f64>,
}

impl EnsembleStats {
    pub fn cycles(&self) -> usize {
        self.mean_energy.len().saturating_sub(1)
    }

    pub fn from_trajectories(trajectories: &[Trajectory]) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(Error::invalid("ensemble needs at least one trajectory"));
        }
        let cycles = trajectories.iter().map(|t| t.outcomes.len()).max().unwrap_or(0);
        let n = trajectories.len() as f64;
        let mut stats = EnsembleStats {
            samples: trajectories.len(),
            mean_energy: Vec::with_capacity(cycles + 1),
            min_energy: Vec::with_capacity(cycles + 1),
            max_energy: Vec::with_capacity(cycles + 1),
            q10_energy: Vec::with_capacity(cycles + 1),
            median_energy: Vec::with_capacity(cycles + 1),
            q90_energy: Vec::with_capacity(cycles + 1),
            mean_ground_population: Vec::with_capacity(cycles + 1),
            ground_fraction: Vec::with_capacity(cycles + 1),
            detection_fraction: Vec::with_capacity(cycles + 1),
        };
        let mut energies = vec![0.0; trajectories.len()];
        for k in 0..=cycles {
            let mut ground_sum = 0.0;
            let mut ground_hits = 0usize;
            let mut detections = 0usize;
            for (slot, t) in energies.iter_mut().zip(trajectories) {
                let (energy, ground, detected) = match k {
                    0 => (t.initial_energy, t.initial_ground_population, false),
                    _ if k <= t.outcomes.len() => {
                        let o = &t.outcomes[k - 1];
                        (o.post_energy, o.ground_population, o.detected != 0)
                    }
                    _ => match t.outcomes.last() {
                        Some(o) => (o.post_energy, o.ground_population, false),
                        None => (t.initial_energy, t.initial_ground_population, false),
                    },
                };
                *slot = energy;
                ground_sum += ground;
                ground_hits += (ground >= GROUND_THRESHOLD) as usize;
                detections += detected as usize;
            }
            stats.mean_energy.push(energies.iter().sum::<f64>() / n);
            let mut sorted = energies.clone();
            sorted.sort_by(f64::total_cmp);
            stats.min_energy.push(sorted[0]);
            stats.max_energy.push(sorted[sorted.len() - 1]);
            stats.q10_energy.push(quantile(&sorted, 0.1));
            stats.median_energy.push(quantile(&sorted, 0.5));
            stats.q90_energy.push(quantile(&sorted, 0.9));
            stats.mean_ground_population.push(ground_sum / n);
            stats.ground_fraction.push(ground_hits as f64 / n);
            stats.detection_fraction.push(detections as f64 / n);
        }
        Ok(stats)
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub master_seed: u64,
    pub trajectories: Vec<Trajectory>,
    pub stats: EnsembleStats,
}

impl Ensemble {
    /// Fraction of trajectories whose ground population reached `threshold`
    /// within the first `cycles` cycles.
    pub fn reached_ground_by(&self, cycles: usize, threshold: f64) -> f64 {
        let hits = self
            .trajectories
            .iter()
            .filter(|t| t.first_ground_cycle(threshold).is_some_and(|k| k <= cycles))
            .count();
        hits as f64 / self.trajectories.len() as f64
    }
}

/// Runs `n_samples` trajectories with seeds split from `cfg.seed`.
///
/// `threads = Some(1)` runs sequentially; any thread count yields identical
/// output because every trajectory owns its random stream and results are
/// aggregated in index order.
pub fn run_ensemble<K: CycleKernel>(
    sim: &CoolingSimulator<K>,
    cfg: &CoolingConfig,
    n_samples: usize,
    threads: Option<usize>,
) -> Result<Ensemble> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    let run = |i: usize| sim.run_trajectory_seeded(cfg, trajectory_seed(cfg.seed, i as u64));
    let trajectories: Vec<Trajectory> = match threads {
        Some(1) => (0..n_samples).map(run).collect::<Result<_>>()?,
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| (0..n_samples).into_par_iter().map(run).collect::<Result<_>>())?,
        None => (0..n_samples).into_par_iter().map(run).collect::<Result<_>>()?,
    };
    let stats = EnsembleStats::from_trajectories(&trajectories)?;
    Ok(Ensemble {
        master_seed: cfg.seed,
        trajectories,
        stats,
    })
}
