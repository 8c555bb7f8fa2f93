//! Closed-form rate predictions, rescaled population curves and ensemble
//! post-processing.

mod channels;
mod circuit;
mod curves;
mod search;

use serde::{Deserialize, Serialize};

pub use channels::{lambda_transition_scan, local_minima, LambdaChannel};
pub use circuit::{
    clock_populations, dominant_clock, program_fidelity, run_cascade, CascadeRun, CascadeStep,
};
pub use curves::{collapse_metric, simulate_chain_curve, PopulationCurve, DEFAULT_CURVE_POINTS, TAU_MAX};
pub use search::{grover_detection, grover_transfer_scan, TransferScan};

use crate::error::{Error, Result};
use crate::problems::{ChainProblem, ChainProfile};

/// Predicted transfer frequency of an n-hop chain, units of Δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePrediction {
    pub n: usize,
    pub profile: ChainProfile,
    pub omega: f64,
    /// False once λ ≥ Δ, where the perturbative formulas lose meaning.
    pub in_regime: bool,
}

fn check_coupling(n: usize, lambda: f64) -> Result<bool> {
    if n < 2 {
        return Err(Error::invalid(format!("rate formulas need n >= 2, got {n}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("coupling must be positive, got {lambda}")));
    }
    let in_regime = lambda < 1.0;
    if !in_regime {
        log::warn!("lambda = {lambda} is outside the perturbative regime lambda < Delta");
    }
    Ok(in_regime)
}

/// Ω_n = Δ(λ/Δ)ⁿ for a chain whose interior levels all sit at Δ.
pub fn omega_flat(n: usize, lambda: f64) -> Result<RatePrediction> {
    let in_regime = check_coupling(n, lambda)?;
    Ok(RatePrediction {
        n,
        profile: ChainProfile::Flat,
        omega: lambda.powi(n as i32),
        in_regime,
    })
}

/// Ω_n = Δ · (Π_{k=1}^{n/2−1} λ/(kΔ))² · λ/((n/2)Δ) for the triangle profile.
pub fn omega_triangle(n: usize, lambda: f64) -> Result<RatePrediction> {
    let in_regime = check_coupling(n, lambda)?;
    if n % 2 != 0 {
        return Err(Error::invalid(format!("triangle rate needs even n, got {n}")));
    }
    let half = n / 2;
    let product: f64 = (1..half).map(|k| lambda / k as f64).product();
    Ok(RatePrediction {
        n,
        profile: ChainProfile::Triangle,
        omega: product * product * lambda / half as f64,
        in_regime,
    })
}

pub fn predicted_rate(p: &ChainProblem, lambda: f64) -> Result<RatePrediction> {
    match p.profile() {
        ChainProfile::Flat => omega_flat(p.order(), lambda),
        ChainProfile::Triangle => omega_triangle(p.order(), lambda),
    }
}

/// Coupling between the solution and non-solution superpositions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverRate {
    /// λ√(n₀(2ᴺ − n₀))/2ᴺ.
    pub exact: f64,
    /// λ√n₀ · 2^(−N/2), valid for n₀ ≪ 2ᴺ.
    pub approx: f64,
}

impl GroverRate {
    /// Resonant transfer time π/(2·exact).
    pub fn transfer_time(&self) -> f64 {
        std::f64::consts::PI / (2.0 * self.exact)
    }
}

pub fn grover_rate(n_qubits: u32, solutions: usize, lambda: f64) -> Result<GroverRate> {
    if n_qubits == 0 || n_qubits > 62 {
        return Err(Error::invalid(format!("Grover register needs 1..=62 qubits, got {n_qubits}")));
    }
    let dim = 1u64 << n_qubits;
    if solutions == 0 || solutions as u64 >= dim {
        return Err(Error::invalid(format!(
            "solution count must satisfy 1 <= n0 < 2^N = {dim}, got {solutions}"
        )));
    }
    let n0 = solutions as f64;
    let d = dim as f64;
    Ok(GroverRate {
        exact: lambda * (n0 * (d - n0)).sqrt() / d,
        approx: lambda * n0.sqrt() / d.sqrt(),
    })
}

/// Means of consecutive non-overlapping windows of `width` samples; a short
/// trailing window is dropped.
pub fn window_means(series: &[f64], width: usize) -> Vec<f64> {
    if width == 0 {
        return Vec::new();
    }
    series
        .chunks_exact(width)
        .map(|w| w.iter().sum::<f64>() / width as f64)
        .collect()
}

/// Largest increase between successive entries, or 0 when the series never rises.
pub fn max_rise(series: &[f64]) -> f64 {
    series
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs().max(1e-300)
    }

    #[test]
    fn flat_values() {
        assert!(close(omega_flat(2, 0.1).unwrap().omega, 0.01));
        assert!(close(omega_flat(6, 0.1).unwrap().omega, 1e-6));
        let edge = omega_flat(3, 1.0).unwrap();
        assert_eq!(edge.omega, 1.0);
        assert!(!edge.in_regime);
        assert!(omega_flat(1, 0.1).is_err());
        assert!(omega_flat(2, 0.0).is_err());
    }

    #[test]
    fn triangle_values() {
        assert!(close(omega_triangle(2, 0.1).unwrap().omega, 0.1));
        assert!(close(omega_triangle(4, 0.1).unwrap().omega, 5e-4));
        let p: f64 = 0.1 * 0.05 * (0.1 / 3.0) * 0.025;
        assert!(close(omega_triangle(10, 0.1).unwrap().omega, p * p * 0.02));
        assert!(omega_triangle(3, 0.1).is_err());
    }

    #[test]
    fn rates_decrease_with_order() {
        for n in 2..12 {
            assert!(omega_flat(n + 1, 0.1).unwrap().omega < omega_flat(n, 0.1).unwrap().omega);
        }
        for n in (2..12).step_by(2) {
            assert!(omega_triangle(n + 2, 0.1).unwrap().omega < omega_triangle(n, 0.1).unwrap().omega);
        }
    }

    #[test]
    fn grover_values() {
        let r = grover_rate(2, 1, 0.1).unwrap();
        assert!(close(r.exact, 0.1 * 3f64.sqrt() / 4.0));
        assert!(close(r.approx, 0.05));
        for n in 2..10 {
            assert!(close(grover_rate(n, 1 << (n - 1), 0.3).unwrap().exact, 0.15));
        }
        let r = grover_rate(8, 1, 0.1).unwrap();
        assert!(close(r.approx, 0.1 / 16.0));
        assert!((r.exact / r.approx - 1.0).abs() < 2e-3);
        assert!(grover_rate(3, 8, 0.1).is_err());
        assert!(grover_rate(3, 0, 0.1).is_err());
    }

    #[test]
    fn windows() {
        assert_eq!(window_means(&[1.0, 3.0, 5.0, 7.0, 9.0], 2), vec![2.0, 6.0]);
        assert_eq!(max_rise(&[3.0, 2.0, 2.5, 1.0]), 0.5);
        assert_eq!(max_rise(&[3.0, 2.0]), 0.0);
    }
}
