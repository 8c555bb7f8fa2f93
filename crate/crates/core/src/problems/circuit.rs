//! Gate sequences compiled into a clock-ladder cooling model.
//!
//! The system register is program ⊗ clock with index `p · (T + 1) + t`. Qubit
//! `q` of the program register is bit `q` of `p`. The clock energy is −tΔ, so
//! each photon emission at ω₁ = Δ advances the computation by one gate.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CavityBank, CoolingModelSpec, ProblemHamiltonian, TransitionKind, TransitionTerm,
};
use crate::qcore::{SparseHermitian, StateVector};

/// Deviation from unitarity tolerated in a gate matrix.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Largest program register accepted.
pub const MAX_PROGRAM_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    I(usize),
    X(usize),
    H(usize),
    /// Phase gate diag(1, e^{iπ/4}).
    T(usize),
    Cnot { control: usize, target: usize },
    /// Arbitrary single-qubit matrix; checked for unitarity.
    Custom { target: usize, matrix: [[C64; 2]; 2] },
}

/// One entry of a circuit file: `{"gate": "cnot", "targets": [0, 1]}`.
///
/// `targets` lists the control first for `cnot`. The `u` gate additionally
/// carries `matrix` as `[[[re, im], [re, im]], [[re, im], [re, im]]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateEntry {
    pub gate: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[[f64; 2]; 2]; 2]>,
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::I(q) | Gate::X(q) | Gate::H(q) | Gate::T(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Custom { target, .. } => vec![target],
        }
    }

    fn single_qubit_matrix(&self) -> Option<(usize, [[C64; 2]; 2])> {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match *self {
            Gate::I(q) => Some((q, [[o, z], [z, o]])),
            Gate::X(q) => Some((q, [[z, o], [o, z]])),
            Gate::H(q) => Some((q, [[s, s], [s, -s]])),
            Gate::T(q) => Some((
                q,
                [[o, z], [z, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
            )),
            Gate::Custom { target, matrix } => Some((target, matrix)),
            Gate::Cnot { .. } => None,
        }
    }

    /// Full matrix on an `n`-qubit register.
    pub fn matrix(&self, n_qubits: usize) -> DMatrix<C64> {
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        match self.single_qubit_matrix() {
            Some((q, u)) => {
                for col in 0..dim {
                    let b = col >> q & 1;
                    for (a, row_entries) in u.iter().enumerate() {
                        let row = col & !(1 << q) | a << q;
                        m[(row, col)] += row_entries[b];
                    }
                }
            }
            None => {
                let Gate::Cnot { control, target } = *self else {
                    unreachable!()
                };
                for col in 0..dim {
                    let row = if col >> control & 1 == 1 {
                        col ^ 1 << target
                    } else {
                        col
                    };
                    m[(row, col)] = C64::new(1.0, 0.0);
                }
            }
        }
        m
    }

    pub fn from_entry(entry: &GateEntry) -> Result<Self> {
        let one_target = || -> Result<usize> {
            match entry.targets.as_slice() {
                [q] => Ok(*q),
                _ => Err(Error::invalid(format!(
                    "gate '{}' takes exactly one target, got {:?}",
                    entry.gate, entry.targets
                ))),
            }
        };
        if entry.matrix.is_some() && entry.gate != "u" {
            return Err(Error::invalid(format!("gate '{}' does not take a matrix", entry.gate)));
        }
        let gate = match entry.gate.to_ascii_lowercase().as_str() {
            "i" | "id" => Gate::I(one_target()?),
            "x" => Gate::X(one_target()?),
            "h" => Gate::H(one_target()?),
            "t" => Gate::T(one_target()?),
            "cnot" | "cx" => match entry.targets.as_slice() {
                [c, t] if c != t => Gate::Cnot {
                    control: *c,
                    target: *t,
                },
                _ => {
                    return Err(Error::invalid(format!(
                        "cnot needs distinct [control, target], got {:?}",
                        entry.targets
                    )))
                }
            },
            "u" => {
                let raw = entry
                    .matrix
                    .ok_or_else(|| Error::invalid("gate 'u' requires a matrix"))?;
                let matrix = raw.map(|row| row.map(|[re, im]| C64::new(re, im)));
                Gate::Custom {
                    target: one_target()?,
                    matrix,
                }
            }
            other => return Err(Error::invalid(format!("unknown gate '{other}'"))),
        };
        Ok(gate)
    }

    pub fn to_entry(&self) -> GateEntry {
        let (name, targets, matrix) = match *self {
            Gate::I(q) => ("i", vec![q], None),
            Gate::X(q) => ("x", vec![q], None),
            Gate::H(q) => ("h", vec![q], None),
            Gate::T(q) => ("t", vec![q], None),
            Gate::Cnot { control, target } => ("cnot", vec![control, target], None),
            Gate::Custom { target, matrix } => (
                "u",
                vec![target],
                Some(matrix.map(|row| row.map(|c| [c.re, c.im]))),
            ),
        };
        GateEntry {
            gate: name.to_string(),
            targets,
            matrix,
        }
    }
}

/// A validated gate sequence U₁ … U_T on an n-qubit program register.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl CompiledCircuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_PROGRAM_QUBITS {
            return Err(Error::invalid(format!(
                "program register must have 1..={MAX_PROGRAM_QUBITS} qubits, got {n_qubits}"
            )));
        }
        if gates.is_empty() {
            return Err(Error::invalid("circuit needs at least one step (T >= 1)"));
        }
        for (step, gate) in gates.iter().enumerate() {
            if let Some(&q) = gate.qubits().iter().find(|&&q| q >= n_qubits) {
                return Err(Error::invalid(format!(
                    "step {}: qubit {q} outside a {n_qubits}-qubit register",
                    step + 1
                )));
            }
            if let Gate::Custom { matrix, .. } = gate {
                let m = DMatrix::from_fn(2, 2, |i, j| matrix[i][j]);
                let deviation = (m.adjoint() * &m - DMatrix::identity(2, 2))
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max);
                if !(deviation <= UNITARITY_TOLERANCE) {
                    return Err(Error::invalid(format!(
                        "step {}: gate is not unitary (deviation {deviation:e})",
                        step + 1
                    )));
                }
            }
        }
        Ok(CompiledCircuit { n_qubits, gates })
    }

    /// Parses the JSON list format; the register width is the largest target + 1
    /// unless `n_qubits` is given.
    pub fn from_entries(entries: &[GateEntry], n_qubits: Option<usize>) -> Result<Self> {
        let gates = entries.iter().map(Gate::from_entry).collect::<Result<Vec<_>>>()?;
        let width = n_qubits.unwrap_or_else(|| {
            gates
                .iter()
                .flat_map(Gate::qubits)
                .max()
                .map_or(1, |q| q + 1)
        });
        Self::new(width, gates)
    }

    pub fn to_entries(&self) -> Vec<GateEntry> {
        self.gates.iter().map(Gate::to_entry).collect()
    }

    /// Uniformly random gates from {X, H, T, CNOT}.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, steps: usize, rng: &mut R) -> Result<Self> {
        let gates = (0..steps)
            .map(|_| {
                let choices = if n_qubits >= 2 { 4 } else { 3 };
                let q = rng.gen_range(0..n_qubits);
                match rng.gen_range(0..choices) {
                    0 => Gate::X(q),
                    1 => Gate::H(q),
                    2 => Gate::T(q),
                    _ => {
                        let mut t = rng.gen_range(0..n_qubits - 1);
                        if t >= q {
                            t += 1;
                        }
                        Gate::Cnot {
                            control: q,
                            target: t,
                        }
                    }
                }
            })
            .collect();
        Self::new(n_qubits, gates)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn program_dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// T, the number of steps.
    pub fn steps(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn clock_dim(&self) -> usize {
        self.steps() + 1
    }

    pub fn system_dim(&self) -> usize {
        self.program_dim() * self.clock_dim()
    }

    pub fn system_index(&self, program: usize, clock: usize) -> usize {
        program * self.clock_dim() + clock
    }

    /// |φ_t⟩ = U_t ⋯ U₁ |φ₀⟩ for every t = 0..=T.
    pub fn history(&self, initial: &StateVector) -> Result<Vec<StateVector>> {
        if initial.dim() != self.program_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.program_dim(),
                found: initial.dim(),
            });
        }
        let mut states = vec![initial.clone()];
        let mut v = nalgebra::DVector::from_column_slice(initial.amplitudes());
        for gate in &self.gates {
            v = gate.matrix(self.n_qubits) * v;
            states.push(StateVector::from_amplitudes(v.iter().copied().collect())?);
        }
        Ok(states)
    }

    /// |φ_T⟩ by direct gate application.
    pub fn output(&self, initial: &StateVector) -> Result<StateVector> {
        Ok(self.history(initial)?.pop().expect("history includes the input"))
    }
}

/// H_P = −Σ_t tΔ |t⟩⟨t| (on every program state) and
/// H_T = Σ_t U_{t+1} ⊗ |t+1⟩⟨t| + h.c.
pub fn circuit_encode(c: &CompiledCircuit) -> Result<(ProblemHamiltonian, TransitionTerm)> {
    let clock = c.clock_dim();
    let energies = (0..c.system_dim()).map(|s| -((s % clock) as i64)).collect();
    let mut triplets = Vec::new();
    for (step, gate) in c.gates().iter().enumerate() {
        let u = gate.matrix(c.n_qubits());
        for p in 0..c.program_dim() {
            for q in 0..c.program_dim() {
                let v = u[(q, p)];
                if v.norm() == 0.0 {
                    continue;
                }
                let from = c.system_index(p, step);
                let to = c.system_index(q, step + 1);
                triplets.push((to, from, v));
                triplets.push((from, to, v.conj()));
            }
        }
    }
    let operator = SparseHermitian::from_triplets(c.system_dim(), triplets)?;
    Ok((
        ProblemHamiltonian::signed(energies)?,
        TransitionTerm::new(TransitionKind::ClockLadder, operator),
    ))
}

/// Clock-ladder model with its fixed cavity: ω₁ = Δ, α₀ = 0.
pub fn circuit_model(c: &CompiledCircuit, lambda: f64) -> Result<CoolingModelSpec> {
    let (problem, transition) = circuit_encode(c)?;
    CoolingModelSpec::new(problem, transition, CavityBank::new(vec![1])?, lambda, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gate_matrices_are_unitary() {
        for gate in [
            Gate::I(0),
            Gate::X(1),
            Gate::H(0),
            Gate::T(1),
            Gate::Cnot {
                control: 1,
                target: 0,
            },
        ] {
            let m = gate.matrix(2);
            let dev = (m.adjoint() * &m - DMatrix::identity(4, 4))
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
            assert!(dev < UNITARITY_TOLERANCE, "{gate:?}");
        }
    }

    #[test]
    fn cnot_flips_target_when_control_set() {
        let m = Gate::Cnot {
            control: 0,
            target: 1,
        }
        .matrix(2);
        // |01⟩ (control bit 0 set) → |11⟩.
        assert_eq!(m[(3, 1)], C64::new(1.0, 0.0));
        assert_eq!(m[(0, 0)], C64::new(1.0, 0.0));
    }

    #[test]
    fn clock_spectrum() {
        let c = CompiledCircuit::new(1, vec![Gate::X(0), Gate::H(0)]).unwrap();
        let (hp, _) = circuit_encode(&c).unwrap();
        let mut levels: Vec<i64> = hp.energies().to_vec();
        levels.sort_unstable();
        levels.dedup();
        assert_eq!(levels, vec![-2, -1, 0]);
    }

    #[test]
    fn ladder_element_is_unity_along_history() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = CompiledCircuit::random(2, 4, &mut rng).unwrap();
        let (_, ht) = circuit_encode(&c).unwrap();
        let phi = c.history(&StateVector::basis(4, 0).unwrap()).unwrap();
        let h = ht.operator();
        for t in 0..c.steps() {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..4 {
                for q in 0..4 {
                    acc += phi[t + 1].amplitudes()[q].conj()
                        * h.get(c.system_index(q, t + 1), c.system_index(p, t))
                        * phi[t].amplitudes()[p];
                }
            }
            assert!((acc - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_circuits() {
        assert!(CompiledCircuit::new(1, vec![]).is_err());
        assert!(CompiledCircuit::new(1, vec![Gate::X(1)]).is_err());
        let half = C64::new(0.5, 0.0);
        let zero = C64::new(0.0, 0.0);
        assert!(CompiledCircuit::new(
            1,
            vec![Gate::Custom {
                target: 0,
                matrix: [[half, zero], [zero, half]]
            }]
        )
        .is_err());
        let entry: GateEntry =
            serde_json::from_str(r#"{"gate": "u", "targets": [0], "matrix": [[[1,0],[0,0]],[[0,0],[2,0]]]}"#)
                .unwrap();
        assert!(CompiledCircuit::from_entries(&[entry], None).is_err());
        let entry: GateEntry = serde_json::from_str(r#"{"gate": "swap", "targets": [0, 1]}"#).unwrap();
        assert!(CompiledCircuit::from_entries(&[entry], None).is_err());
    }

    #[test]
    fn entries_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = CompiledCircuit::random(3, 6, &mut rng).unwrap();
        let json = serde_json::to_string(&c.to_entries()).unwrap();
        let entries: Vec<GateEntry> = serde_json::from_str(&json).unwrap();
        assert_eq!(CompiledCircuit::from_entries(&entries, Some(3)).unwrap(), c);
    }
}
