//! Long multiplication of two 3-bit integers as a penalty Hamiltonian.
//!
//! Register layout (most significant first): `x₂x₁x₀ y₂y₁y₀ c₃c₂c₁c₀`, so a
//! basis index is `x << 7 | y << 4 | c`. The product `z̄` is fixed. Each of the
//! five column equations below costs one Δ when violated:
//!
//! ```text
//! (1) x₀y₀                     = z₀
//! (2) x₁y₀ + x₀y₁              = 2c₀ + z₁
//! (3) x₂y₀ + x₁y₁ + x₀y₂ + c₀  = 4c₂ + 2c₁ + z₂
//! (4) x₂y₁ + x₁y₂ + c₁         = 2c₃ + z₃
//! (5) x₂y₂ + c₂ + c₃           = 2z₅ + z₄
//! ```

use crate::error::{Error, Result};
use crate::model::{CavityBank, CoolingModelSpec, ProblemHamiltonian, TransitionTerm};

pub const FACTORING_QUBITS: u32 = 10;
pub const CONSTRAINT_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactoringProblem {
    target: u8,
}

impl FactoringProblem {
    pub fn new(target: u32) -> Result<Self> {
        if target >= 64 {
            return Err(Error::invalid(format!("product must fit in 6 bits, got {target}")));
        }
        Ok(FactoringProblem {
            target: target as u8,
        })
    }

    pub fn target(&self) -> u32 {
        self.target as u32
    }
}

/// Decoded register contents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment {
    pub x: u32,
    pub y: u32,
    pub carries: u32,
}

impl Assignment {
    pub fn decode(z: usize) -> Self {
        Assignment {
            x: (z >> 7 & 0b111) as u32,
            y: (z >> 4 & 0b111) as u32,
            carries: (z & 0b1111) as u32,
        }
    }

    pub fn encode(&self) -> usize {
        (self.x as usize) << 7 | (self.y as usize) << 4 | self.carries as usize
    }

    /// Same carries, factors exchanged.
    pub fn swapped(&self) -> Self {
        Assignment {
            x: self.y,
            y: self.x,
            carries: self.carries,
        }
    }
}

fn bit(v: u32, i: u32) -> u32 {
    v >> i & 1
}

/// Which of the five column equations the assignment violates.
pub fn violated_constraints(target: u32, a: Assignment) -> [bool; CONSTRAINT_COUNT] {
    let (x, y, c, z) = (a.x, a.y, a.carries, target);
    let p = |i, j| bit(x, i) * bit(y, j);
    [
        p(0, 0) != bit(z, 0),
        p(1, 0) + p(0, 1) != 2 * bit(c, 0) + bit(z, 1),
        p(2, 0) + p(1, 1) + p(0, 2) + bit(c, 0) != 4 * bit(c, 2) + 2 * bit(c, 1) + bit(z, 2),
        p(2, 1) + p(1, 2) + bit(c, 1) != 2 * bit(c, 3) + bit(z, 3),
        p(2, 2) + bit(c, 2) + bit(c, 3) != 2 * bit(z, 5) + bit(z, 4),
    ]
}

/// E(z) = number of violated column equations, in units of Δ.
pub fn factoring_encode(p: &FactoringProblem) -> ProblemHamiltonian {
    let energies = (0..1usize << FACTORING_QUBITS)
        .map(|z| {
            violated_constraints(p.target(), Assignment::decode(z))
                .iter()
                .filter(|&&v| v)
                .count() as i64
        })
        .collect();
    ProblemHamiltonian::new(energies).expect("penalty counts are non-negative")
}

/// Factoring model with Hamming-one hops and `ω_m = mΔ` cavities.
pub fn factoring_model(
    p: &FactoringProblem,
    modes: usize,
    lambda: f64,
    alpha0: bool,
) -> Result<CoolingModelSpec> {
    CoolingModelSpec::new(
        factoring_encode(p),
        TransitionTerm::sum_of_x(FACTORING_QUBITS)?,
        CavityBank::harmonic(modes)?,
        lambda,
        alpha0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_round_trip() {
        for z in 0..1024 {
            assert_eq!(Assignment::decode(z).encode(), z);
        }
        let a = Assignment::decode(0b101_111_0110);
        assert_eq!((a.x, a.y, a.carries), (5, 7, 0b0110));
    }

    #[test]
    fn all_zero_assignment_for_35() {
        // 35 = 0b100011: columns 1, 2 and 5 fail.
        let e = factoring_encode(&FactoringProblem::new(35).unwrap());
        assert_eq!(e.energy(0), 3);
    }

    #[test]
    fn energies_bounded_and_swap_symmetric() {
        let e = factoring_encode(&FactoringProblem::new(35).unwrap());
        for z in 0..1024 {
            assert!((0..=5).contains(&e.energy(z)));
            let swapped = Assignment::decode(z).swapped().encode();
            assert_eq!(e.energy(z), e.energy(swapped));
        }
    }

    #[test]
    fn target_range() {
        assert!(FactoringProblem::new(63).is_ok());
        assert!(FactoringProblem::new(64).is_err());
    }
}
