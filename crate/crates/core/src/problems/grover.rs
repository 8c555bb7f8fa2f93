//! Unstructured search: one energy quantum on every unmarked string, coupled
//! through the projector onto the uniform superposition.

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{
    CavityBank, CoolingModelSpec, ProblemHamiltonian, TransitionKind, TransitionTerm,
};
use crate::qcore::HermitianOp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroverProblem {
    n_qubits: u32,
    marked: BTreeSet<usize>,
}

impl GroverProblem {
    pub fn new(n_qubits: u32, marked: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 24 {
            return Err(Error::invalid(format!("grover register must have 1..=24 qubits, got {n_qubits}")));
        }
        let marked: BTreeSet<usize> = marked.into_iter().collect();
        let dim = 1usize << n_qubits;
        if marked.is_empty() {
            return Err(Error::invalid("grover problem needs at least one marked string"));
        }
        if marked.len() >= dim {
            return Err(Error::invalid("every string is marked; there is no non-solution subspace"));
        }
        if let Some(&z) = marked.iter().find(|&&z| z >= dim) {
            return Err(Error::OutOfRange { index: z, dim });
        }
        Ok(GroverProblem { n_qubits, marked })
    }

    /// Marks the first `count` strings, 0..count.
    pub fn with_count(n_qubits: u32, count: usize) -> Result<Self> {
        Self::new(n_qubits, 0..count)
    }

    pub fn n_qubits(&self) -> u32 {
        self.n_qubits
    }

    pub fn marked(&self) -> &BTreeSet<usize> {
        &self.marked
    }

    pub fn solution_count(&self) -> usize {
        self.marked.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn energies(&self) -> Vec<i64> {
        (0..self.dim())
            .map(|z| if self.marked.contains(&z) { 0 } else { 1 })
            .collect()
    }
}

/// E(z) = 0 on marked strings and 1 elsewhere; H_T = ⊗ᵢ (Iᵢ + Xᵢ)/2.
pub fn grover_encode(p: &GroverProblem) -> Result<(ProblemHamiltonian, TransitionTerm)> {
    Ok((
        ProblemHamiltonian::new(p.energies())?,
        TransitionTerm::grover_projector(p.n_qubits())?,
    ))
}

/// The search model with its fixed cavity: one mode at ω₁ = Δ, α₀ = 0.
pub fn grover_model(p: &GroverProblem, lambda: f64) -> Result<CoolingModelSpec> {
    let (problem, transition) = grover_encode(p)?;
    CoolingModelSpec::new(problem, transition, CavityBank::new(vec![1])?, lambda, false)
}

/// Matrix-free form of an assembled search model.
///
/// The projector is applied through the register sum, so one product costs
/// O(dim) instead of the O(4ᴺ) of the dense transition block.
#[derive(Debug, Clone)]
pub struct GroverOperator {
    system_dim: usize,
    modes: usize,
    diagonal: Vec<f64>,
    lambda: f64,
    alpha0: bool,
}

impl GroverOperator {
    pub fn from_spec(spec: &CoolingModelSpec) -> Result<Self> {
        spec.validate()?;
        if spec.transition.kind() != TransitionKind::GroverProjector {
            return Err(Error::invalid("structured search operator needs a projector transition term"));
        }
        if spec.rotating_wave {
            return Err(Error::invalid("structured search operator does not support the rotating-wave filter"));
        }
        let layout = spec.layout();
        let mut diagonal = Vec::with_capacity(layout.dim());
        for z in 0..layout.system_dim() {
            for b in 0..layout.cavity_dim() {
                diagonal.push((spec.problem.energy(z) + spec.cavities.photon_energy(b)) as f64);
            }
        }
        Ok(GroverOperator {
            system_dim: layout.system_dim(),
            modes: layout.modes(),
            diagonal,
            lambda: spec.lambda,
            alpha0: spec.alpha0,
        })
    }
}

impl HermitianOp for GroverOperator {
    fn dim(&self) -> usize {
        self.diagonal.len()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let cavity_dim = 1usize << self.modes;
        let mut sums = vec![C64::new(0.0, 0.0); cavity_dim];
        for (i, &a) in x.iter().enumerate() {
            sums[i & (cavity_dim - 1)] += a;
        }
        let scale = self.lambda / self.system_dim as f64;
        let coupled: Vec<C64> = (0..cavity_dim)
            .map(|b| {
                let mut acc = if self.alpha0 { sums[b] } else { C64::new(0.0, 0.0) };
                for m in 0..self.modes {
                    acc += sums[b ^ 1 << m];
                }
                acc * scale
            })
            .collect();
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = x[i] * self.diagonal[i] + coupled[i & (cavity_dim - 1)];
        }
    }

    fn is_real(&self) -> bool {
        true
    }

    fn spectral_bounds(&self) -> Option<(f64, f64)> {
        // The coupling block is λ·P ⊗ (α₀I + Σσˣ) with P a projector.
        let coupling = self.lambda * (self.alpha0 as usize + self.modes) as f64;
        let lo = self.diagonal.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.diagonal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some((lo - coupling, hi + coupling))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{HermitianOp, SparseHermitian};

    #[test]
    fn indicator_energies() {
        let p = GroverProblem::new(2, [3]).unwrap();
        assert_eq!(p.energies(), vec![1, 1, 1, 0]);
    }

    #[test]
    fn rejects_degenerate_marking() {
        assert!(GroverProblem::new(2, []).is_err());
        assert!(GroverProblem::new(2, 0..4).is_err());
        assert!(GroverProblem::new(2, [4]).is_err());
    }

    #[test]
    fn projector_is_idempotent() {
        let (_, ht) = grover_encode(&GroverProblem::new(3, [5]).unwrap()).unwrap();
        let p = ht.operator().to_dense();
        let p2 = &p * &p;
        assert!((p2 - p).iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn off_diagonal_block_is_projector_times_cavity_flip() {
        // 4×4 block ⟨z',1|H|z,0⟩ = λ/4 for every pair, by hand.
        let lambda = 0.1;
        let spec = grover_model(&GroverProblem::new(2, [3]).unwrap(), lambda).unwrap();
        let h = spec.assemble().unwrap();
        let layout = spec.layout();
        for z in 0..4 {
            for zp in 0..4 {
                let v = h.get(layout.index(zp, 1).unwrap(), layout.index(z, 0).unwrap());
                assert!((v - C64::new(lambda / 4.0, 0.0)).norm() < 1e-15);
                let same = h.get(layout.index(zp, 0).unwrap(), layout.index(z, 0).unwrap());
                if z != zp {
                    assert_eq!(same, C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn structured_operator_matches_assembly() {
        for alpha0 in [false, true] {
            let p = GroverProblem::new(4, [2, 9, 11]).unwrap();
            let (problem, transition) = grover_encode(&p).unwrap();
            let spec = CoolingModelSpec::new(
                problem,
                transition,
                CavityBank::new(vec![1, 2]).unwrap(),
                0.07,
                alpha0,
            )
            .unwrap();
            let sparse = spec.assemble().unwrap();
            let structured = GroverOperator::from_spec(&spec).unwrap();
            let diff = SparseHermitian::to_dense(&sparse) - structured.to_dense();
            assert!(diff.iter().all(|v| v.norm() < 1e-15));
        }
    }
}
