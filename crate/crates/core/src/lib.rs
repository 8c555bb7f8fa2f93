//! Simulator for cooling-based quantum computation.
//!
//! A problem register is coupled to a bank of truncated cavity modes. Each
//! cooling cycle evolves the joint state, measures the cavities, and empties
//! them, so energy released by resonant transitions is carried away one
//! photon at a time.
//!
//! Energies and frequencies are in units of the level spacing Δ = 1, times in
//! units of 1/Δ.

pub mod analysis;
pub mod error;
pub mod model;
pub mod problems;
pub mod protocol;
pub mod qcore;

pub use error::{Error, Result};
pub use model::{
    assemble, commutator_norm, BasisLayout, CavityBank, CoolingModelSpec, ProblemHamiltonian,
    TransitionKind, TransitionTerm,
};
pub use num_complex::Complex64 as C64;
pub use protocol::{
    run_ensemble, CoolingConfig, CoolingSimulator, CycleOutcome, Ensemble, EnsembleStats,
    InitialState, Termination, Trajectory,
};
pub use qcore::{
    apply, evolve, expectation, EvolutionEngine, EvolutionMethod, HermitianOp, SparseHermitian,
    StateVector,
};
