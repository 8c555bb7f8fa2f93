//! Population of the far end of a chain against rescaled time τ = tΩ_n/π.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{predicted_rate, RatePrediction};
use crate::error::{Error, Result};
use crate::problems::{chain_encode, ChainProblem};
use crate::qcore::SpectralDecomposition;

pub const TAU_MAX: f64 = 1.2;
pub const DEFAULT_CURVE_POINTS: usize = 241;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationCurve {
    pub prediction: RatePrediction,
    pub lambda: f64,
    pub tau: Vec<f64>,
    /// |⟨z_n|ψ(t)⟩|² at t = τπ/Ω_n.
    pub population: Vec<f64>,
    /// Total population of the chain at each grid point.
    pub norm: Vec<f64>,
}

impl PopulationCurve {
    /// Grid index and value of the largest population.
    pub fn peak(&self) -> (f64, f64) {
        let (i, &p) = self
            .population
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("curve has at least two points");
        (self.tau[i], p)
    }

    /// First local maximum of the population, or the last point when it keeps rising.
    pub fn first_maximum(&self) -> (f64, f64) {
        let p = &self.population;
        (1..p.len() - 1)
            .find(|&i| p[i] >= p[i - 1] && p[i] > p[i + 1])
            .map(|i| (self.tau[i], p[i]))
            .unwrap_or((self.tau[p.len() - 1], p[p.len() - 1]))
    }

    /// Linear interpolation of the population at `tau`.
    pub fn population_at(&self, tau: f64) -> f64 {
        let last = self.tau.len() - 1;
        if tau <= self.tau[0] {
            return self.population[0];
        }
        if tau >= self.tau[last] {
            return self.population[last];
        }
        let i = self.tau.partition_point(|&t| t <= tau) - 1;
        let w = (tau - self.tau[i]) / (self.tau[i + 1] - self.tau[i]);
        self.population[i] * (1.0 - w) + self.population[i + 1] * w
    }
}

/// Evolves |z₀⟩ under the chain Hamiltonian by exact diagonalization and
/// samples the end-state population on `n_points` of τ ∈ [0, 1.2].
pub fn simulate_chain_curve(p: &ChainProblem, lambda: f64, n_points: usize) -> Result<PopulationCurve> {
    if n_points < 2 {
        return Err(Error::invalid(format!("curve needs at least 2 points, got {n_points}")));
    }
    let prediction = predicted_rate(p, lambda)?;
    let h = chain_encode(p, lambda)?;
    let spectral = SpectralDecomposition::new(&h)?;
    let dim = h.dim();
    let mut start = vec![C64::new(0.0, 0.0); dim];
    start[0] = C64::new(1.0, 0.0);

    let mut tau = Vec::with_capacity(n_points);
    let mut population = Vec::with_capacity(n_points);
    let mut norm = Vec::with_capacity(n_points);
    for k in 0..n_points {
        let s = TAU_MAX * k as f64 / (n_points - 1) as f64;
        let psi = spectral.evolve_amplitudes(&start, s * PI / prediction.omega)?;
        tau.push(s);
        population.push(psi[dim - 1].norm_sqr());
        norm.push(psi.iter().map(|a| a.norm_sqr()).sum());
    }
    Ok(PopulationCurve {
        prediction,
        lambda,
        tau,
        population,
        norm,
    })
}

/// Largest spread (max − min) across curves at any common grid point.
pub fn collapse_metric(curves: &[PopulationCurve]) -> Result<f64> {
    if curves.len() < 2 {
        return Err(Error::invalid("collapse metric needs at least two curves"));
    }
    let grid = &curves[0].tau;
    for c in &curves[1..] {
        if c.tau.len() != grid.len() || c.tau.iter().zip(grid).any(|(a, b)| (a - b).abs() > 1e-12) {
            return Err(Error::invalid("curves are sampled on different tau grids"));
        }
    }
    let spread = (0..grid.len())
        .map(|k| {
            let (lo, hi) = curves.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                (lo.min(c.population[k]), hi.max(c.population[k]))
            });
            hi - lo
        })
        .fold(0.0, f64::max);
    Ok(spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ChainProfile;

    #[test]
    fn closed_chain_keeps_norm() {
        let p = ChainProblem::new(4, ChainProfile::Flat).unwrap();
        let c = simulate_chain_curve(&p, 0.1, 41).unwrap();
        assert!(c.norm.iter().all(|n| (n - 1.0).abs() < 1e-10));
        assert!(c.population.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
        assert_eq!(c.tau.len(), 41);
        assert!((c.tau[40] - TAU_MAX).abs() < 1e-15);
    }

    #[test]
    fn identical_curves_collapse_to_zero() {
        let p = ChainProblem::new(2, ChainProfile::Flat).unwrap();
        let c = simulate_chain_curve(&p, 0.1, 21).unwrap();
        assert_eq!(collapse_metric(&[c.clone(), c.clone()]).unwrap(), 0.0);
        let other = simulate_chain_curve(&p, 0.1, 31).unwrap();
        assert!(collapse_metric(&[c.clone(), other]).is_err());
        assert!(collapse_metric(&[c]).is_err());
    }

    #[test]
    fn interpolation() {
        let p = ChainProblem::new(2, ChainProfile::Flat).unwrap();
        let c = simulate_chain_curve(&p, 0.1, 3).unwrap();
        assert_eq!(c.population_at(0.0), c.population[0]);
        let mid = c.population_at(0.3);
        assert!((mid - 0.5 * (c.population[0] + c.population[1])).abs() < 1e-15);
    }
}
