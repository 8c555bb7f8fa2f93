//! Photon detection in the structured search model, started from the
//! uniform superposition of non-solutions with the cavity empty.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{grover_model, GroverOperator, GroverProblem};
use crate::qcore::{EvolutionEngine, StateVector};

/// |φ₁⟩ ⊗ |0⟩ on the joint register of the search model.
fn non_solution_start(p: &GroverProblem) -> Result<Vec<C64>> {
    let rest = p.dim() - p.solution_count();
    let amp = C64::new(1.0 / (rest as f64).sqrt(), 0.0);
    // One cavity mode: index z << 1.
    let mut v = vec![C64::new(0.0, 0.0); 2 * p.dim()];
    for z in (0..p.dim()).filter(|z| !p.marked().contains(z)) {
        v[z << 1] = amp;
    }
    Ok(v)
}

fn detection(v: &[C64]) -> f64 {
    v.iter().skip(1).step_by(2).map(|a| a.norm_sqr()).sum()
}

/// Probability that the cavity holds a photon after evolving for `t`.
pub fn grover_detection(p: &GroverProblem, lambda: f64, t: f64, engine: &EvolutionEngine) -> Result<f64> {
    let op = GroverOperator::from_spec(&grover_model(p, lambda)?)?;
    let start = StateVector::from_amplitudes(non_solution_start(p)?)?;
    let end = engine.evolve(&op, &start, t)?;
    Ok(detection(end.amplitudes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferScan {
    pub times: Vec<f64>,
    pub detection: Vec<f64>,
    /// Largest detection in the window, refined by a parabola through the
    /// grid points around it. Off-resonant terms add small fast wiggles, so
    /// the window should hold only the first transfer.
    pub first_peak_time: f64,
    pub first_peak_detection: f64,
}

/// Detection probability on `n_steps` equal steps up to `t_max`, which
/// should lie below three transfer times.
pub fn grover_transfer_scan(
    p: &GroverProblem,
    lambda: f64,
    t_max: f64,
    n_steps: usize,
    engine: &EvolutionEngine,
) -> Result<TransferScan> {
    if !(t_max > 0.0) || !t_max.is_finite() || n_steps < 2 {
        return Err(Error::invalid(format!(
            "scan needs t_max > 0 and at least 2 steps, got {t_max} and {n_steps}"
        )));
    }
    let op = GroverOperator::from_spec(&grover_model(p, lambda)?)?;
    let propagator = engine.prepare(&op)?;
    let dt = t_max / n_steps as f64;
    let mut state = non_solution_start(p)?;
    let mut times = vec![0.0];
    let mut probs = vec![0.0];
    for k in 1..=n_steps {
        state = propagator.evolve_amplitudes(&state, dt)?;
        times.push(k as f64 * dt);
        probs.push(detection(&state));
    }
    let peak = (1..n_steps)
        .max_by(|&a, &b| probs[a].total_cmp(&probs[b]))
        .filter(|&k| probs[k] > probs[n_steps])
        .ok_or_else(|| Error::invalid("no detection maximum inside the scan window"))?;
    let (a, b, c) = (probs[peak - 1], probs[peak], probs[peak + 1]);
    let curvature = a - 2.0 * b + c;
    let offset = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
    Ok(TransferScan {
        first_peak_time: times[peak] + offset * dt,
        first_peak_detection: b - 0.25 * (a - c) * offset,
        times,
        detection: probs,
    })
}
