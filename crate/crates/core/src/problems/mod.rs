//! Problem encoders and the exhaustive ground-state oracle.

mod chain;
mod circuit;
mod factoring;
mod grover;

use serde::{Deserialize, Serialize};

pub use chain::{chain_encode, ChainProblem, ChainProfile};
pub use circuit::{
    circuit_encode, circuit_model, CompiledCircuit, Gate, GateEntry, MAX_PROGRAM_QUBITS,
    UNITARITY_TOLERANCE,
};
pub use factoring::{
    factoring_encode, factoring_model, violated_constraints, Assignment, FactoringProblem,
    CONSTRAINT_COUNT, FACTORING_QUBITS,
};
pub use grover::{grover_encode, grover_model, GroverOperator, GroverProblem};

use crate::error::{Error, Result};
use crate::model::ProblemHamiltonian;

/// Largest register the exhaustive oracle will enumerate.
pub const ORACLE_MAX_QUBITS: u32 = 24;

/// Minimum energy and every string attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub min_energy: i64,
    pub minimizers: Vec<usize>,
}

/// Enumerates all 2ᴺ strings of an arbitrary cost function.
pub fn brute_force_minimize<F: Fn(usize) -> i64>(n_qubits: u32, cost: F) -> Result<GroundTruth> {
    if n_qubits > ORACLE_MAX_QUBITS {
        return Err(Error::DimensionCap {
            dim: 1usize << n_qubits.min(63),
            cap: 1 << ORACLE_MAX_QUBITS,
        });
    }
    let mut min_energy = i64::MAX;
    let mut minimizers = Vec::new();
    for z in 0..1usize << n_qubits {
        let e = cost(z);
        if e < min_energy {
            min_energy = e;
            minimizers.clear();
        }
        if e == min_energy {
            minimizers.push(z);
        }
    }
    Ok(GroundTruth {
        min_energy,
        minimizers,
    })
}

/// Exhaustive ground state of a qubit problem Hamiltonian.
pub fn brute_force_ground(p: &ProblemHamiltonian) -> Result<GroundTruth> {
    let n = p.n_qubits().ok_or_else(|| {
        Error::invalid(format!("oracle needs a qubit register, dimension {} is not a power of two", p.dim()))
    })?;
    brute_force_minimize(n, |z| p.energy(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grover_oracle() {
        let (hp, _) = grover_encode(&GroverProblem::new(3, [5]).unwrap()).unwrap();
        let truth = brute_force_ground(&hp).unwrap();
        assert_eq!(truth.min_energy, 0);
        assert_eq!(truth.minimizers, vec![5]);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(
            brute_force_minimize(25, |_| 0),
            Err(Error::DimensionCap { .. })
        ));
        let chain = ProblemHamiltonian::new(vec![0, 1, 0]).unwrap();
        assert!(brute_force_ground(&chain).is_err());
    }
}
