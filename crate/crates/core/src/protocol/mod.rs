//! The stochastic cooling cycle: evolve, measure every cavity, reset, repeat.

mod ensemble;
mod kernel;
mod measure;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use ensemble::{run_ensemble, trajectory_seed, Ensemble, EnsembleStats, GROUND_THRESHOLD};
pub use kernel::{CycleKernel, DirectKernel, SectorPropagator};
pub use measure::{cavity_probabilities, project_and_reset, sample_pattern, PROBABILITY_TOLERANCE};

use crate::error::{Error, Result};
use crate::model::{BasisLayout, ProblemHamiltonian};
use crate::problems::brute_force_ground;
use crate::qcore::StateVector;

/// Weight outside the zero-photon sector tolerated at the start of a cycle.
const SECTOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum InitialState {
    /// A fixed computational basis state |z₀⟩.
    Basis(usize),
    /// Equal superposition of all system basis states.
    Uniform,
    /// A basis state drawn from the trajectory's own random stream.
    RandomBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingConfig {
    /// Evolution time per cycle, units of 1/Δ.
    pub cycle_duration: f64,
    pub max_cycles: usize,
    /// Stop after this many consecutive cycles without a photon; 0 disables.
    pub quiet_cycles_to_stop: usize,
    pub seed: u64,
    pub initial_state: InitialState,
}

impl CoolingConfig {
    /// Duration π/(2λ), the optimal time for a transition of strength λ.
    pub fn for_coupling(lambda: f64, max_cycles: usize, seed: u64) -> Self {
        CoolingConfig {
            cycle_duration: PI / (2.0 * lambda),
            max_cycles,
            quiet_cycles_to_stop: 0,
            seed,
            initial_state: InitialState::RandomBasis,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cycle_duration > 0.0) || !self.cycle_duration.is_finite() {
            return Err(Error::invalid(format!(
                "cycle duration must be positive, got {}",
                self.cycle_duration
            )));
        }
        if self.max_cycles == 0 {
            return Err(Error::invalid("max_cycles must be at least 1"));
        }
        Ok(())
    }
}

/// Record of one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleOutcome {
    /// Measured cavity pattern; bit m − 1 set when mode m held a photon.
    pub detected: usize,
    /// ⟨H_P⟩ after measurement and reset, units of Δ.
    pub post_energy: f64,
    /// Population of the ground manifold after reset.
    pub ground_population: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    MaxCycles,
    QuietStop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub initial_energy: f64,
    pub initial_ground_population: f64,
    pub outcomes: Vec<CycleOutcome>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn detections(&self) -> usize {
        self.outcomes.iter().filter(|o| o.detected != 0).count()
    }

    /// Index (1-based) of the first cycle whose ground population reaches
    /// `threshold`, or 0 if the start state already does.
    pub fn first_ground_cycle(&self, threshold: f64) -> Option<usize> {
        if self.initial_ground_population >= threshold {
            return Some(0);
        }
        self.outcomes
            .iter()
            .position(|o| o.ground_population >= threshold)
            .map(|k| k + 1)
    }
}

/// Ground manifold from the exhaustive oracle, or the minimum of E when the
/// system is not a qubit register.
pub fn ground_manifold(problem: &ProblemHamiltonian) -> Vec<usize> {
    match brute_force_ground(problem) {
        Ok(truth) => truth.minimizers,
        Err(_) => problem.ground_states(),
    }
}

/// A cooling model ready to run: the cycle kernel plus what is recorded.
pub struct CoolingSimulator<K: CycleKernel> {
    kernel: K,
    energies: Vec<f64>,
    ground: Vec<usize>,
}

impl<K: CycleKernel> CoolingSimulator<K> {
    pub fn new(kernel: K, problem: &ProblemHamiltonian) -> Result<Self> {
        let ground = ground_manifold(problem);
        Self::with_ground_manifold(kernel, problem, ground)
    }

    pub fn with_ground_manifold(kernel: K, problem: &ProblemHamiltonian, ground: Vec<usize>) -> Result<Self> {
        let layout = kernel.layout();
        if problem.dim() != layout.system_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.system_dim(),
                found: problem.dim(),
            });
        }
        if let Some(&z) = ground.iter().find(|&&z| z >= problem.dim()) {
            return Err(Error::OutOfRange {
                index: z,
                dim: problem.dim(),
            });
        }
        Ok(CoolingSimulator {
            kernel,
            energies: problem.energies().iter().map(|&e| e as f64).collect(),
            ground,
        })
    }

    pub fn kernel(&self) -> &K {
        &self.kernel
    }

    pub fn layout(&self) -> BasisLayout {
        self.kernel.layout()
    }

    pub fn ground(&self) -> &[usize] {
        &self.ground
    }

    /// ⟨H_P⟩ of a normalized system-register state.
    pub fn system_energy(&self, system: &[C64]) -> f64 {
        system
            .iter()
            .zip(&self.energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum()
    }

    pub fn ground_population(&self, system: &[C64]) -> f64 {
        self.ground.iter().map(|&z| system[z].norm_sqr()).sum::<f64>().min(1.0)
    }

    /// Evolve, measure with the uniform draw `u`, reset. Operates on the
    /// system register; the cavities are implicitly empty before and after.
    ///
    /// Patterns are visited in increasing order and the first whose
    /// cumulative probability exceeds `u` is selected, the same rule as
    /// [`sample_pattern`]. Blockwise kernels stop evaluating there; the
    /// normalization check then covers the patterns examined so far.
    pub fn cycle_system(&self, system: &[C64], u: f64) -> Result<(Vec<C64>, CycleOutcome)> {
        let layout = self.layout();
        let full = if self.kernel.blockwise() {
            None
        } else {
            let evolved = self.kernel.propagate(system)?;
            cavity_probabilities(&evolved, &layout)?;
            Some(evolved)
        };
        let mut acc = 0.0;
        let mut chosen: Option<(usize, Vec<C64>, f64)> = None;
        let mut exhausted = true;
        for b in 0..layout.cavity_dim() {
            let block = match &full {
                Some(evolved) => kernel::extract_block(evolved, &layout, b),
                None => self.kernel.block(system, b)?,
            };
            let p: f64 = block.iter().map(|a| a.norm_sqr()).sum();
            if !p.is_finite() {
                return Err(Error::NonFinite("cavity block"));
            }
            if p <= 0.0 {
                continue;
            }
            acc += p;
            if acc > 1.0 + PROBABILITY_TOLERANCE {
                return Err(Error::ProbabilityNormalization { total: acc });
            }
            chosen = Some((b, block, p));
            if u < acc {
                exhausted = false;
                break;
            }
        }
        if exhausted && (acc - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::ProbabilityNormalization { total: acc });
        }
        let (pattern, mut next, p) = chosen.ok_or(Error::ZeroNorm)?;
        let scale = p.sqrt();
        next.iter_mut().for_each(|a| *a /= scale);
        let outcome = CycleOutcome {
            detected: pattern,
            post_energy: self.system_energy(&next),
            ground_population: self.ground_population(&next),
        };
        Ok((next, outcome))
    }

    /// One cooling cycle on a full-space state whose cavities are empty.
    /// The returned state again has every cavity empty.
    pub fn run_cycle<R: Rng + ?Sized>(
        &self,
        psi: &StateVector,
        rng: &mut R,
    ) -> Result<(StateVector, CycleOutcome)> {
        let layout = self.layout();
        if psi.dim() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: psi.dim(),
            });
        }
        let cavity_mask = layout.cavity_dim() - 1;
        let outside: f64 = psi
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| i & cavity_mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if outside > SECTOR_TOLERANCE {
            return Err(Error::CavityNotEmpty { weight: outside });
        }
        let system: Vec<C64> = psi
            .amplitudes()
            .iter()
            .step_by(layout.cavity_dim())
            .copied()
            .collect();
        let (next, outcome) = self.cycle_system(&system, rng.gen::<f64>())?;
        let mut full = vec![C64::new(0.0, 0.0); layout.dim()];
        for (z, a) in next.into_iter().enumerate() {
            full[z << layout.modes()] = a;
        }
        Ok((StateVector::from_amplitudes(full)?, outcome))
    }

    fn initial_system(&self, init: InitialState, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
        let dim = self.layout().system_dim();
        let index = match init {
            InitialState::Basis(z) => z,
            InitialState::RandomBasis => rng.gen_range(0..dim),
            InitialState::Uniform => {
                return Ok(StateVector::uniform(dim)?.into_amplitudes());
            }
        };
        Ok(StateVector::basis(dim, index)?.into_amplitudes())
    }

    fn check_config(&self, cfg: &CoolingConfig) -> Result<()> {
        cfg.validate()?;
        let kernel = self.kernel.duration();
        if (cfg.cycle_duration - kernel).abs() > 1e-12 * kernel.max(1.0) {
            return Err(Error::invalid(format!(
                "configured cycle duration {} differs from the kernel's {}",
                cfg.cycle_duration, kernel
            )));
        }
        Ok(())
    }

    /// Runs cycles from the configured start until `max_cycles` or the quiet-stop rule.
    pub fn run_trajectory(&self, cfg: &CoolingConfig) -> Result<Trajectory> {
        self.run_trajectory_seeded(cfg, cfg.seed)
    }

    /// As [`Self::run_trajectory`] with an explicit stream seed.
    pub fn run_trajectory_seeded(&self, cfg: &CoolingConfig, seed: u64) -> Result<Trajectory> {
        self.check_config(cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut system = self.initial_system(cfg.initial_state, &mut rng)?;
        let initial_energy = self.system_energy(&system);
        let initial_ground_population = self.ground_population(&system);
        let mut outcomes = Vec::with_capacity(cfg.max_cycles.min(1 << 16));
        let mut quiet = 0;
        let mut termination = Termination::MaxCycles;
        for _ in 0..cfg.max_cycles {
            let (next, outcome) = self.cycle_system(&system, rng.gen::<f64>())?;
            system = next;
            outcomes.push(outcome);
            quiet = if outcome.detected == 0 { quiet + 1 } else { 0 };
            if cfg.quiet_cycles_to_stop > 0 && quiet >= cfg.quiet_cycles_to_stop {
                termination = Termination::QuietStop;
                break;
            }
        }
        Ok(Trajectory {
            seed,
            initial_energy,
            initial_ground_population,
            outcomes,
            termination,
        })
    }
}
