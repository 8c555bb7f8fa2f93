//! Experiment configuration. A config file holds one `ExperimentConfig`;
//! command-line flags override its fields, and the resolved result is
//! echoed into every run summary.

use std::path::{Path, PathBuf};

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use cqc_core::problems::{ChainProfile, GateEntry};

use crate::CliError;

pub const DEFAULT_OUT: &str = "cqc-out";
/// Largest search register the grover command accepts.
pub const GROVER_MAX_QUBITS: u32 = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; per-trajectory seeds are split from it.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; absent means all cores. Results do not depend on it.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub experiment: Experiment,
}

fn default_out() -> PathBuf {
    PathBuf::from(DEFAULT_OUT)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Chain(ChainParams),
    Grover(GroverParams),
    Factor(FactorParams),
    Circuit(CircuitParams),
    Sweep(SweepParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Chain(_) => "chain",
            Experiment::Grover(_) => "grover",
            Experiment::Factor(_) => "factor",
            Experiment::Circuit(_) => "circuit",
            Experiment::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Flat,
    Triangle,
}

impl From<Profile> for ChainProfile {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Flat => ChainProfile::Flat,
            Profile::Triangle => ChainProfile::Triangle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    pub profile: Profile,
    /// Chain orders, one curve each.
    pub n: Vec<usize>,
    #[serde(default = "default_chain_lambda")]
    pub lambda: f64,
    /// Grid points on τ ∈ [0, 1.2].
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_chain_lambda() -> f64 {
    0.1
}

fn default_points() -> usize {
    cqc_core::analysis::DEFAULT_CURVE_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GroverParams {
    pub n_qubits: Vec<u32>,
    pub solutions: Vec<usize>,
    #[serde(default = "default_grover_lambda")]
    pub lambda: f64,
    /// Time steps of the detection scan.
    #[serde(default = "default_scan_steps")]
    pub scan_steps: usize,
    /// Scan window in units of the predicted transfer time; below 3.
    #[serde(default = "default_scan_span")]
    pub scan_span: f64,
}

fn default_grover_lambda() -> f64 {
    0.004
}

fn default_scan_steps() -> usize {
    600
}

fn default_scan_span() -> f64 {
    1.5
}

/// Start state of each trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Initial {
    /// A basis state drawn from the trajectory's random stream.
    Random,
    Uniform,
    Basis(usize),
}

impl From<Initial> for cqc_core::InitialState {
    fn from(i: Initial) -> Self {
        match i {
            Initial::Random => cqc_core::InitialState::RandomBasis,
            Initial::Uniform => cqc_core::InitialState::Uniform,
            Initial::Basis(z) => cqc_core::InitialState::Basis(z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Propagator {
    /// Precompute the zero-photon columns of the cycle propagator once.
    Sector,
    /// Evolve every cycle with Krylov.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FactorParams {
    #[serde(default = "default_z")]
    pub z: u32,
    #[serde(default = "default_true")]
    pub alpha0: bool,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_factor_lambda")]
    pub lambda: f64,
    /// Cycle duration; absent means π/(2λ).
    #[serde(default)]
    pub duration: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default = "default_initial")]
    pub initial: Initial,
    /// Stop a trajectory after this many photon-free cycles; 0 never stops.
    #[serde(default)]
    pub quiet_cycles: usize,
    /// Keep only energy-conserving cavity hops.
    #[serde(default)]
    pub rotating_wave: bool,
    #[serde(default = "default_propagator")]
    pub propagator: Propagator,
    /// Individual trajectories written out in full.
    #[serde(default = "default_keep")]
    pub keep_trajectories: usize,
}

fn default_z() -> u32 {
    35
}

fn default_true() -> bool {
    true
}

fn default_modes() -> usize {
    3
}

fn default_factor_lambda() -> f64 {
    0.1
}

fn default_samples() -> usize {
    100
}

fn default_cycles() -> usize {
    400
}

fn default_initial() -> Initial {
    Initial::Random
}

fn default_propagator() -> Propagator {
    Propagator::Sector
}

fn default_keep() -> usize {
    5
}

impl Default for FactorParams {
    fn default() -> Self {
        FactorParams {
            z: default_z(),
            alpha0: true,
            modes: default_modes(),
            lambda: default_factor_lambda(),
            duration: None,
            samples: default_samples(),
            cycles: default_cycles(),
            initial: default_initial(),
            quiet_cycles: 0,
            rotating_wave: false,
            propagator: default_propagator(),
            keep_trajectories: default_keep(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    /// Gate list. A circuit file given on the command line is read into
    /// this field, so a resolved config is self-contained.
    pub gates: Vec<GateSpec>,
    /// Register width; absent means the highest target plus one.
    #[serde(default)]
    pub n_qubits: Option<usize>,
    #[serde(default = "default_circuit_lambda")]
    pub lambda: f64,
    /// Program basis state the computation starts from.
    #[serde(default)]
    pub input: usize,
    /// Give up after this many cycles; absent means 20 per gate.
    #[serde(default)]
    pub max_cycles: Option<usize>,
}

/// One circuit-file entry: `{"gate": "cnot", "targets": [0, 1]}`, control
/// first. Gate `u` also takes `matrix` as `[[[re, im], [re, im]], [[re, im], [re, im]]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    /// One of i, x, h, t, cnot, u.
    pub gate: String,
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[[f64; 2]; 2]; 2]>,
}

impl From<&GateSpec> for GateEntry {
    fn from(g: &GateSpec) -> Self {
        GateEntry {
            gate: g.gate.clone(),
            targets: g.targets.clone(),
            matrix: g.matrix,
        }
    }
}

fn default_circuit_lambda() -> f64 {
    0.02
}

impl CircuitParams {
    pub fn compile(&self) -> Result<cqc_core::problems::CompiledCircuit, CliError> {
        let entries: Vec<GateEntry> = self.gates.iter().map(GateEntry::from).collect();
        Ok(cqc_core::problems::CompiledCircuit::from_entries(&entries, self.n_qubits)?)
    }

    /// Gates are read from a JSON list of entries.
    pub fn read_gates(path: &Path) -> Result<Vec<GateSpec>, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read circuit {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("circuit {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    /// Couplings to sweep; each run uses duration π/(2λ).
    pub lambdas: Vec<f64>,
    #[serde(default = "default_z")]
    pub z: u32,
    #[serde(default = "default_true")]
    pub alpha0: bool,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_cycles")]
    pub cycles: usize,
    #[serde(default)]
    pub rotating_wave: bool,
    #[serde(default = "default_propagator")]
    pub propagator: Propagator,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn coupling(v: f64) -> Result<(), CliError> {
    positive("lambda", v)?;
    if v >= 1.0 {
        return Err(invalid(format!("lambda must be below 1 (units of the level spacing), got {v}")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Checks ranges that the model constructors would otherwise reject
    /// mid-run.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        match &self.experiment {
            Experiment::Chain(p) => {
                coupling(p.lambda)?;
                if p.n.len() < 2 {
                    return Err(invalid("chain needs at least two orders to compare"));
                }
                if p.points < 2 {
                    return Err(invalid("chain needs at least 2 grid points"));
                }
                for &n in &p.n {
                    cqc_core::problems::ChainProblem::new(n, p.profile.into())?;
                }
            }
            Experiment::Grover(p) => {
                coupling(p.lambda)?;
                if p.n_qubits.is_empty() || p.solutions.is_empty() {
                    return Err(invalid("grover needs at least one register size and solution count"));
                }
                for &n in &p.n_qubits {
                    if n == 0 || n > GROVER_MAX_QUBITS {
                        return Err(invalid(format!("register size must be 1..={GROVER_MAX_QUBITS}, got {n}")));
                    }
                    for &n0 in &p.solutions {
                        cqc_core::analysis::grover_rate(n, n0, p.lambda)?;
                    }
                }
                if p.scan_steps < 2 {
                    return Err(invalid("scan needs at least 2 steps"));
                }
                if !(p.scan_span > 1.0 && p.scan_span < 3.0) {
                    return Err(invalid(format!("scan span must lie in (1, 3), got {}", p.scan_span)));
                }
            }
            Experiment::Factor(p) => {
                cqc_core::problems::FactoringProblem::new(p.z)?;
                coupling(p.lambda)?;
                if let Some(d) = p.duration {
                    positive("duration", d)?;
                }
                factor_common(p.modes, p.samples, p.cycles)?;
                if let Initial::Basis(z) = p.initial {
                    if z >= 1 << cqc_core::problems::FACTORING_QUBITS {
                        return Err(invalid(format!("initial basis state {z} outside the 10-qubit register")));
                    }
                }
            }
            Experiment::Circuit(p) => {
                coupling(p.lambda)?;
                if p.gates.is_empty() {
                    return Err(invalid("circuit has no gates"));
                }
                let c = p.compile()?;
                if p.input >= c.program_dim() {
                    return Err(invalid(format!("input state {} outside the {}-qubit register", p.input, c.n_qubits())));
                }
                if p.max_cycles == Some(0) {
                    return Err(invalid("max_cycles must be at least 1"));
                }
            }
            Experiment::Sweep(p) => {
                cqc_core::problems::FactoringProblem::new(p.z)?;
                if p.lambdas.is_empty() {
                    return Err(invalid("sweep needs at least one lambda"));
                }
                for &l in &p.lambdas {
                    coupling(l)?;
                }
                factor_common(p.modes, p.samples, p.cycles)?;
            }
        }
        Ok(())
    }

    /// Reads a config file, or the `config` member of a run summary.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("config {} is not valid JSON: {e}", path.display())))?;
        let value = match value {
            serde_json::Value::Object(mut map) if map.contains_key("config") && map.contains_key("results") => {
                map.remove("config").unwrap()
            }
            other => other,
        };
        serde_json::from_value(value).map_err(|e| invalid(format!("config {}: {e}", path.display())))
    }
}

fn factor_common(modes: usize, samples: usize, cycles: usize) -> Result<(), CliError> {
    if !(1..=5).contains(&modes) {
        return Err(invalid(format!("modes must be 1..=5, got {modes}")));
    }
    if samples == 0 || cycles == 0 {
        return Err(invalid("samples and cycles must be at least 1"));
    }
    Ok(())
}

/// JSON schema of [`ExperimentConfig`].
pub fn schema() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(ExperimentConfig)).expect("schema serializes")
}
