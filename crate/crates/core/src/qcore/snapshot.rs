//! JSON snapshots of operators and states.
//!
//! Operators: `{"dim": n, "entries": [[row, col, re, im], ...]}` with entries in
//! row-major order. States: `{"dim": n, "amplitudes": [[re, im], ...]}`. Indices
//! follow the canonical system-major, cavity-minor basis ordering.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{SparseHermitian, StateVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSnapshot {
    pub dim: usize,
    pub entries: Vec<(usize, usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSnapshot {
    pub dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&SparseHermitian> for OperatorSnapshot {
    fn from(op: &SparseHermitian) -> Self {
        OperatorSnapshot {
            dim: op.dim(),
            entries: op.triplets().map(|(i, j, v)| (i, j, v.re, v.im)).collect(),
        }
    }
}

impl TryFrom<&OperatorSnapshot> for SparseHermitian {
    type Error = Error;

    fn try_from(s: &OperatorSnapshot) -> Result<Self> {
        SparseHermitian::from_triplets(
            s.dim,
            s.entries
                .iter()
                .map(|&(i, j, re, im)| (i, j, C64::new(re, im)))
                .collect(),
        )
    }
}

impl From<&StateVector> for StateSnapshot {
    fn from(psi: &StateVector) -> Self {
        StateSnapshot {
            dim: psi.dim(),
            amplitudes: psi.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl TryFrom<&StateSnapshot> for StateVector {
    type Error = Error;

    fn try_from(s: &StateSnapshot) -> Result<Self> {
        if s.amplitudes.len() != s.dim {
            return Err(Error::DimensionMismatch {
                expected: s.dim,
                found: s.amplitudes.len(),
            });
        }
        StateVector::from_amplitudes(s.amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}
