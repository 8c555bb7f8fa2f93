//! The full cooling Hamiltonian on the system ⊗ cavity space.
//!
//! ```text
//! H = H_P ⊗ I + Σ_m ω_m n̂_m + λ H_T ⊗ [α₀ I + Σ_m (σ⁻_m + σ⁺_m)]
//! ```
//!
//! Each cavity mode is truncated to a single photon and stored as one qubit.
//! The basis index is `z · 2^M + b`, system major and cavity minor, where mode
//! `m` (1-based) occupies bit `m − 1` of the cavity pattern `b`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::SparseHermitian;

/// Default upper bound on the assembled dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 24;

/// Diagonal cost Hamiltonian, energies in integer multiples of Δ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemHamiltonian {
    energies: Vec<i64>,
}

impl ProblemHamiltonian {
    /// A cost function: every energy must be non-negative.
    pub fn new(energies: Vec<i64>) -> Result<Self> {
        if let Some(z) = energies.iter().position(|&e| e < 0) {
            return Err(Error::invalid(format!(
                "cost energies must be non-negative, E({z}) = {}",
                energies[z]
            )));
        }
        Self::signed(energies)
    }

    /// Allows negative levels, as in the clock ladder of a compiled circuit.
    pub fn signed(energies: Vec<i64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::invalid("problem Hamiltonian needs at least one level"));
        }
        Ok(ProblemHamiltonian { energies })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<u32> {
        self.dim()
            .is_power_of_two()
            .then(|| self.dim().trailing_zeros())
    }

    pub fn energy(&self, z: usize) -> i64 {
        self.energies[z]
    }

    pub fn energies(&self) -> &[i64] {
        &self.energies
    }

    pub fn min_energy(&self) -> i64 {
        *self.energies.iter().min().expect("non-empty")
    }

    pub fn max_energy(&self) -> i64 {
        *self.energies.iter().max().expect("non-empty")
    }

    /// All minimizers of the energy.
    pub fn ground_states(&self) -> Vec<usize> {
        let min = self.min_energy();
        (0..self.dim()).filter(|&z| self.energies[z] == min).collect()
    }

    pub fn operator(&self) -> Result<SparseHermitian> {
        let diag: Vec<f64> = self.energies.iter().map(|&e| e as f64).collect();
        SparseHermitian::from_real_diagonal(&diag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransitionKind {
    /// Σᵢ Xᵢ: Hamming-distance-one hops.
    SumOfX,
    /// ⊗ᵢ (Iᵢ + Xᵢ)/2: projector onto the uniform superposition.
    GroverProjector,
    /// Σ_t U_{t+1} ⊗ |t+1⟩⟨t| + h.c. on program ⊗ clock.
    ClockLadder,
    /// Nearest-neighbour hops along an explicit chain of states.
    ChainAdjacency,
}

/// Off-diagonal generator acting on the system register.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTerm {
    kind: TransitionKind,
    operator: SparseHermitian,
}

impl TransitionTerm {
    pub fn new(kind: TransitionKind, operator: SparseHermitian) -> Self {
        TransitionTerm { kind, operator }
    }

    /// Σᵢ Xᵢ on `n` qubits.
    pub fn sum_of_x(n: u32) -> Result<Self> {
        let dim = 1usize << n;
        let one = C64::new(1.0, 0.0);
        let mut triplets = Vec::with_capacity(dim * n as usize);
        for z in 0..dim {
            for i in 0..n {
                triplets.push((z ^ (1 << i), z, one));
            }
        }
        Ok(Self::new(
            TransitionKind::SumOfX,
            SparseHermitian::from_triplets(dim, triplets)?,
        ))
    }

    /// ⊗ᵢ (Iᵢ + Xᵢ)/2 on `n` qubits: every entry equals 2⁻ⁿ.
    pub fn grover_projector(n: u32) -> Result<Self> {
        let dim = 1usize << n;
        let v = C64::new(1.0 / dim as f64, 0.0);
        let triplets = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j, v)))
            .collect();
        Ok(Self::new(
            TransitionKind::GroverProjector,
            SparseHermitian::from_triplets(dim, triplets)?,
        ))
    }

    /// Unit hops between consecutive states of a chain of `len` states.
    pub fn chain_adjacency(len: usize) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        let triplets = (0..len.saturating_sub(1))
            .flat_map(|j| [(j, j + 1, one), (j + 1, j, one)])
            .collect();
        Ok(Self::new(
            TransitionKind::ChainAdjacency,
            SparseHermitian::from_triplets(len, triplets)?,
        ))
    }

    pub fn kind(&self) -> TransitionKind {
        self.kind
    }

    pub fn operator(&self) -> &SparseHermitian {
        &self.operator
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }
}

/// Truncated cavity modes with frequencies in integer multiples of Δ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CavityBank {
    omegas: Vec<i64>,
}

impl CavityBank {
    pub fn new(omegas: Vec<i64>) -> Result<Self> {
        if let Some(&w) = omegas.iter().find(|&&w| w <= 0) {
            return Err(Error::invalid(format!("cavity frequencies must be positive, got {w}")));
        }
        if omegas.len() > 16 {
            return Err(Error::invalid("at most 16 cavity modes are supported"));
        }
        Ok(CavityBank { omegas })
    }

    /// Modes with ω_m = mΔ for m = 1..=M.
    pub fn harmonic(modes: usize) -> Result<Self> {
        Self::new((1..=modes as i64).collect())
    }

    pub fn modes(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[i64] {
        &self.omegas
    }

    pub fn register_dim(&self) -> usize {
        1 << self.modes()
    }

    /// Σ_m ω_m b_m for the cavity pattern `b`.
    pub fn photon_energy(&self, pattern: usize) -> i64 {
        self.omegas
            .iter()
            .enumerate()
            .filter(|(m, _)| pattern >> m & 1 == 1)
            .map(|(_, &w)| w)
            .sum()
    }
}

/// Index bookkeeping for the composite basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLayout {
    system_dim: usize,
    modes: usize,
}

impl BasisLayout {
    pub fn new(system_dim: usize, modes: usize) -> Self {
        BasisLayout { system_dim, modes }
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cavity_dim(&self) -> usize {
        1 << self.modes
    }

    pub fn dim(&self) -> usize {
        self.system_dim << self.modes
    }

    pub fn index(&self, z: usize, b: usize) -> Result<usize> {
        if z >= self.system_dim {
            return Err(Error::OutOfRange {
                index: z,
                dim: self.system_dim,
            });
        }
        if b >= self.cavity_dim() {
            return Err(Error::OutOfRange {
                index: b,
                dim: self.cavity_dim(),
            });
        }
        Ok(z << self.modes | b)
    }

    /// Inverse of [`BasisLayout::index`].
    pub fn split(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.dim() {
            return Err(Error::OutOfRange {
                index,
                dim: self.dim(),
            });
        }
        Ok((index >> self.modes, index & (self.cavity_dim() - 1)))
    }
}

/// Everything needed to assemble the cooling Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct CoolingModelSpec {
    pub problem: ProblemHamiltonian,
    pub transition: TransitionTerm,
    pub cavities: CavityBank,
    pub lambda: f64,
    pub alpha0: bool,
    /// Keep only cavity hops that conserve the bare energy E(z) + Σω_m b_m,
    /// dropping the counter-rotating emission terms. Off by default.
    pub rotating_wave: bool,
}

impl CoolingModelSpec {
    pub fn new(
        problem: ProblemHamiltonian,
        transition: TransitionTerm,
        cavities: CavityBank,
        lambda: f64,
        alpha0: bool,
    ) -> Result<Self> {
        let spec = CoolingModelSpec {
            problem,
            transition,
            cavities,
            lambda,
            alpha0,
            rotating_wave: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rotating_wave(mut self, rotating_wave: bool) -> Self {
        self.rotating_wave = rotating_wave;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.transition.dim() != self.problem.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.problem.dim(),
                found: self.transition.dim(),
            });
        }
        if !(self.lambda >= 0.0 && self.lambda < 1.0) {
            return Err(Error::invalid(format!(
                "coupling must satisfy 0 <= lambda < 1 (units of Delta), got {}",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn layout(&self) -> BasisLayout {
        BasisLayout::new(self.problem.dim(), self.cavities.modes())
    }

    pub fn dim(&self) -> usize {
        self.layout().dim()
    }

    pub fn assemble(&self) -> Result<SparseHermitian> {
        assemble(self, DEFAULT_DIMENSION_CAP)
    }
}

/// Builds the full Hamiltonian in the canonical basis.
pub fn assemble(spec: &CoolingModelSpec, cap: usize) -> Result<SparseHermitian> {
    spec.validate()?;
    let modes = spec.cavities.modes();
    let dim = spec
        .problem
        .dim()
        .checked_shl(modes as u32)
        .filter(|&d| d >> modes == spec.problem.dim())
        .ok_or(Error::DimensionCap { dim: usize::MAX, cap })?;
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let layout = spec.layout();
    let cavity_dim = layout.cavity_dim();
    let couplings_per_entry = spec.alpha0 as usize + modes;
    let mut triplets =
        Vec::with_capacity(dim + spec.transition.operator().nnz() * cavity_dim * couplings_per_entry);

    for z in 0..spec.problem.dim() {
        let e = spec.problem.energy(z);
        for b in 0..cavity_dim {
            let diag = (e + spec.cavities.photon_energy(b)) as f64;
            triplets.push((z << modes | b, z << modes | b, C64::new(diag, 0.0)));
        }
    }
    if spec.lambda != 0.0 {
        for (zp, z, v) in spec.transition.operator().triplets() {
            let v = v * spec.lambda;
            for b in 0..cavity_dim {
                if spec.alpha0 {
                    triplets.push((zp << modes | b, z << modes | b, v));
                }
                for m in 0..modes {
                    let bp = b ^ 1 << m;
                    if spec.rotating_wave
                        && spec.problem.energy(zp) + spec.cavities.photon_energy(bp)
                            != spec.problem.energy(z) + spec.cavities.photon_energy(b)
                    {
                        continue;
                    }
                    triplets.push((zp << modes | bp, z << modes | b, v));
                }
            }
        }
    }
    SparseHermitian::from_triplets(dim, triplets)
}

/// Frobenius norm of [H_P, H_T].
///
/// Used only as a positivity check that the transition term does not commute
/// with the problem Hamiltonian.
pub fn commutator_norm(problem: &SparseHermitian, transition: &SparseHermitian) -> Result<f64> {
    problem.commutator_frobenius(transition)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn non_interacting_diagonal() {
        let spec = CoolingModelSpec::new(
            ProblemHamiltonian::new(vec![0, 1]).unwrap(),
            TransitionTerm::sum_of_x(1).unwrap(),
            CavityBank::new(vec![1]).unwrap(),
            0.0,
            true,
        )
        .unwrap();
        let h = spec.assemble().unwrap();
        assert!(h.is_diagonal());
        assert_eq!(h.diagonal(), vec![0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn basis_index_edges_and_round_trip() {
        let layout = BasisLayout::new(1 << 6, 4);
        assert_eq!(layout.index(0, 0).unwrap(), 0);
        assert_eq!(layout.index(63, 15).unwrap(), (1 << 10) - 1);
        for i in 0..layout.dim() {
            let (z, b) = layout.split(i).unwrap();
            assert_eq!(layout.index(z, b).unwrap(), i);
        }
        assert!(layout.index(64, 0).is_err());
        assert!(layout.index(0, 16).is_err());
        assert!(layout.split(1 << 10).is_err());
    }

    #[test]
    fn cavity_terms_flip_one_bit_and_alpha0_none() {
        let spec = CoolingModelSpec::new(
            ProblemHamiltonian::new(vec![0, 2, 1, 3]).unwrap(),
            TransitionTerm::sum_of_x(2).unwrap(),
            CavityBank::harmonic(3).unwrap(),
            0.1,
            true,
        )
        .unwrap();
        let layout = spec.layout();
        let h = spec.assemble().unwrap();
        for (i, j, v) in h.triplets() {
            if i == j {
                continue;
            }
            let (zi, bi) = layout.split(i).unwrap();
            let (zj, bj) = layout.split(j).unwrap();
            assert_eq!((zi ^ zj).count_ones(), 1);
            assert!((bi ^ bj).count_ones() <= 1);
            assert_eq!(v, c(0.1));
        }
    }

    #[test]
    fn zero_photon_block_is_problem_plus_transition() {
        let problem = ProblemHamiltonian::new(vec![3, 0, 1, 2, 2, 1, 0, 4]).unwrap();
        let transition = TransitionTerm::sum_of_x(3).unwrap();
        let lambda = 0.1;
        let expected = problem
            .operator()
            .unwrap()
            .add(&transition.operator().scaled(lambda).unwrap())
            .unwrap();
        let spec = CoolingModelSpec::new(
            problem,
            transition,
            CavityBank::harmonic(2).unwrap(),
            lambda,
            true,
        )
        .unwrap();
        let layout = spec.layout();
        let h = spec.assemble().unwrap();
        for z in 0..8 {
            for zp in 0..8 {
                let got = h.get(layout.index(z, 0).unwrap(), layout.index(zp, 0).unwrap());
                assert_eq!(got, expected.get(z, zp));
            }
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let spec = CoolingModelSpec::new(
            ProblemHamiltonian::new(vec![0; 16]).unwrap(),
            TransitionTerm::sum_of_x(4).unwrap(),
            CavityBank::harmonic(2).unwrap(),
            0.1,
            false,
        )
        .unwrap();
        assert!(matches!(assemble(&spec, 32), Err(Error::DimensionCap { dim: 64, cap: 32 })));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ProblemHamiltonian::new(vec![0, -1]).is_err());
        assert!(ProblemHamiltonian::signed(vec![0, -1]).is_ok());
        assert!(CavityBank::new(vec![1, 0]).is_err());
        let mismatch = CoolingModelSpec::new(
            ProblemHamiltonian::new(vec![0, 1]).unwrap(),
            TransitionTerm::sum_of_x(2).unwrap(),
            CavityBank::harmonic(1).unwrap(),
            0.1,
            false,
        );
        assert!(mismatch.is_err());
        let strong = CoolingModelSpec::new(
            ProblemHamiltonian::new(vec![0, 1]).unwrap(),
            TransitionTerm::sum_of_x(1).unwrap(),
            CavityBank::harmonic(1).unwrap(),
            1.5,
            false,
        );
        assert!(strong.is_err());
    }

    #[test]
    fn commutator_positivity() {
        let hp = SparseHermitian::from_real_diagonal(&[0.0, 1.0]).unwrap();
        assert!(commutator_norm(&hp, &SparseHermitian::pauli_x()).unwrap() > 0.0);
        assert_eq!(commutator_norm(&hp, &hp).unwrap(), 0.0);
    }

    #[test]
    fn photon_energy_sums_occupied_modes() {
        let bank = CavityBank::harmonic(3).unwrap();
        assert_eq!(bank.photon_energy(0b000), 0);
        assert_eq!(bank.photon_energy(0b101), 4);
        assert_eq!(bank.photon_energy(0b111), 6);
    }

    #[test]
    fn rotating_wave_keeps_only_resonant_hops() {
        let spec = CoolingModelSpec::new(
            ProblemHamiltonian::new(vec![0, 1]).unwrap(),
            TransitionTerm::sum_of_x(1).unwrap(),
            CavityBank::new(vec![1]).unwrap(),
            0.1,
            true,
        )
        .unwrap()
        .with_rotating_wave(true);
        let h = spec.assemble().unwrap();
        let l = spec.layout();
        // |1,0⟩ ↔ |0,1⟩ conserves energy; |0,0⟩ ↔ |1,1⟩ does not.
        assert_eq!(h.get(l.index(0, 1).unwrap(), l.index(1, 0).unwrap()), c(0.1));
        assert_eq!(h.get(l.index(1, 1).unwrap(), l.index(0, 0).unwrap()), c(0.0));
        // Photon-number-preserving hops stay.
        assert_eq!(h.get(l.index(1, 0).unwrap(), l.index(0, 0).unwrap()), c(0.1));
    }
}
