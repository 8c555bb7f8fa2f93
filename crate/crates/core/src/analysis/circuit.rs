//! Clock-register bookkeeping for compiled circuits.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::CompiledCircuit;
use crate::protocol::{CoolingSimulator, CycleKernel};
use crate::qcore::StateVector;

/// Population of each clock value t = 0..=T in a system-register state.
pub fn clock_populations(c: &CompiledCircuit, system: &[C64]) -> Result<Vec<f64>> {
    if system.len() != c.system_dim() {
        return Err(Error::DimensionMismatch {
            expected: c.system_dim(),
            found: system.len(),
        });
    }
    let mut pops = vec![0.0; c.clock_dim()];
    for (s, a) in system.iter().enumerate() {
        pops[s % c.clock_dim()] += a.norm_sqr();
    }
    Ok(pops)
}

/// Clock value with the largest population; ties resolve to the lower value.
pub fn dominant_clock(populations: &[f64]) -> usize {
    populations
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (t, &p)| if p > best.1 { (t, p) } else { best })
        .0
}

/// ⟨φ|ρ_P|φ⟩ with ρ_P the program register's reduced state, clock traced out.
pub fn program_fidelity(c: &CompiledCircuit, system: &[C64], target: &StateVector) -> Result<f64> {
    if target.dim() != c.program_dim() {
        return Err(Error::DimensionMismatch {
            expected: c.program_dim(),
            found: target.dim(),
        });
    }
    let clock = c.clock_dim();
    let mut fidelity = 0.0;
    for t in 0..clock {
        let overlap: C64 = (0..c.program_dim())
            .map(|p| target.amplitudes()[p].conj() * system[c.system_index(p, t)])
            .sum();
        fidelity += overlap.norm_sqr();
    }
    Ok(fidelity)
}

/// One cycle of a cascade run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeStep {
    pub cycle: usize,
    pub detected: usize,
    pub clock_populations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeRun {
    pub seed: u64,
    pub steps: Vec<CascadeStep>,
    /// Cycles until the dominant clock value first reached T, if it did.
    pub cycles_to_complete: Option<usize>,
    pub detections: usize,
    /// Fidelity of the final program state with the directly computed output.
    pub fidelity: f64,
    /// (from, to) dominant clock values for every cycle where it decreased.
    pub heating_events: Vec<(usize, usize)>,
}

/// Cools from `|initial⟩ ⊗ |t = 0⟩` until the dominant clock value reaches T
/// or `max_cycles` cycles have run.
pub fn run_cascade<K: CycleKernel>(
    sim: &CoolingSimulator<K>,
    circuit: &CompiledCircuit,
    initial: &StateVector,
    seed: u64,
    max_cycles: usize,
) -> Result<CascadeRun> {
    if initial.dim() != circuit.program_dim() {
        return Err(Error::DimensionMismatch {
            expected: circuit.program_dim(),
            found: initial.dim(),
        });
    }
    let target = circuit.output(initial)?;
    let mut system = vec![C64::new(0.0, 0.0); circuit.system_dim()];
    for (p, &a) in initial.amplitudes().iter().enumerate() {
        system[circuit.system_index(p, 0)] = a;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut steps = Vec::new();
    let mut heating_events = Vec::new();
    let mut detections = 0;
    let mut cycles_to_complete = None;
    let mut clock = 0;
    for cycle in 1..=max_cycles {
        let (next, outcome) = sim.cycle_system(&system, rng.gen::<f64>())?;
        system = next;
        let pops = clock_populations(circuit, &system)?;
        let now = dominant_clock(&pops);
        if now < clock {
            heating_events.push((clock, now));
        }
        clock = now;
        detections += (outcome.detected != 0) as usize;
        steps.push(CascadeStep {
            cycle,
            detected: outcome.detected,
            clock_populations: pops,
        });
        if clock == circuit.steps() {
            cycles_to_complete = Some(cycle);
            break;
        }
    }
    Ok(CascadeRun {
        seed,
        steps,
        cycles_to_complete,
        detections,
        fidelity: program_fidelity(circuit, &system, &target)?,
        heating_events,
    })
}
