//! Explicit transition chains |z₀⟩ ↔ |z₁⟩ ↔ … ↔ |zₙ⟩ used to probe high-order rates.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ProblemHamiltonian, TransitionTerm};
use crate::qcore::SparseHermitian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainProfile {
    /// Endpoints at 0, every interior state at Δ.
    Flat,
    /// Rises by Δ per hop to the midpoint, then falls back to 0.
    Triangle,
}

impl fmt::Display for ChainProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainProfile::Flat => "flat",
            ChainProfile::Triangle => "triangle",
        })
    }
}

impl FromStr for ChainProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(ChainProfile::Flat),
            "triangle" => Ok(ChainProfile::Triangle),
            other => Err(Error::invalid(format!("unknown chain profile '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainProblem {
    n: usize,
    profile: ChainProfile,
}

impl ChainProblem {
    pub fn new(n: usize, profile: ChainProfile) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("{profile} chain needs n >= 2, got {n}")));
        }
        if profile == ChainProfile::Triangle && n % 2 != 0 {
            return Err(Error::invalid(format!("triangle chain needs even n, got {n}")));
        }
        Ok(ChainProblem { n, profile })
    }

    /// Number of hops; the chain has n + 1 states.
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn profile(&self) -> ChainProfile {
        self.profile
    }

    pub fn energies(&self) -> Vec<i64> {
        let n = self.n as i64;
        (0..=n)
            .map(|j| match self.profile {
                ChainProfile::Flat if j == 0 || j == n => 0,
                ChainProfile::Flat => 1,
                ChainProfile::Triangle => j.min(n - j),
            })
            .collect()
    }

    pub fn problem_hamiltonian(&self) -> Result<ProblemHamiltonian> {
        ProblemHamiltonian::new(self.energies())
    }

    pub fn transition(&self) -> Result<TransitionTerm> {
        TransitionTerm::chain_adjacency(self.n + 1)
    }
}

/// Tridiagonal chain Hamiltonian: E(z_j) on the diagonal, λ between neighbours.
pub fn chain_encode(p: &ChainProblem, lambda: f64) -> Result<SparseHermitian> {
    let mut triplets: Vec<(usize, usize, C64)> = p
        .energies()
        .into_iter()
        .enumerate()
        .map(|(j, e)| (j, j, C64::new(e as f64, 0.0)))
        .collect();
    for j in 0..p.order() {
        triplets.push((j, j + 1, C64::new(lambda, 0.0)));
        triplets.push((j + 1, j, C64::new(lambda, 0.0)));
    }
    SparseHermitian::from_triplets(p.order() + 1, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_two_hop() {
        let h = chain_encode(&ChainProblem::new(2, ChainProfile::Flat).unwrap(), 0.1).unwrap();
        assert_eq!(h.diagonal(), vec![0.0, 1.0, 0.0]);
        assert_eq!(h.get(0, 1), C64::new(0.1, 0.0));
        assert_eq!(h.get(2, 1), C64::new(0.1, 0.0));
        assert_eq!(h.get(0, 2), C64::new(0.0, 0.0));
    }

    #[test]
    fn triangle_four_hop() {
        let p = ChainProblem::new(4, ChainProfile::Triangle).unwrap();
        assert_eq!(p.energies(), vec![0, 1, 2, 1, 0]);
    }

    #[test]
    fn preconditions() {
        assert!(ChainProblem::new(1, ChainProfile::Flat).is_err());
        assert!(ChainProblem::new(3, ChainProfile::Triangle).is_err());
        assert!(ChainProblem::new(3, ChainProfile::Flat).is_ok());
        assert!("zigzag".parse::<ChainProfile>().is_err());
    }
}
