use std::f64::consts::PI;
use std::path::PathBuf;

use cqc_core::analysis::grover_rate;
use cqc_core::problems::{factoring_model, grover_model, FactoringProblem, GroverProblem};
use cqc_core::protocol::{trajectory_seed, DirectKernel, EnsembleStats};
use cqc_core::{
    run_ensemble, CavityBank, CoolingConfig, CoolingModelSpec, CoolingSimulator, EvolutionEngine,
    InitialState, ProblemHamiltonian, SparseHermitian, StateVector, Termination, TransitionTerm, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn exact_sim<'a>(
    spec: &CoolingModelSpec,
    h: &'a SparseHermitian,
    duration: f64,
) -> CoolingSimulator<DirectKernel<'a, SparseHermitian>> {
    let kernel = DirectKernel::new(h, spec.layout(), duration, &EvolutionEngine::exact()).unwrap();
    CoolingSimulator::new(kernel, &spec.problem).unwrap()
}

#[test]
fn uncoupled_model_keeps_state() {
    let spec = CoolingModelSpec::new(
        ProblemHamiltonian::new(vec![0, 1, 2, 1]).unwrap(),
        TransitionTerm::sum_of_x(2).unwrap(),
        CavityBank::harmonic(2).unwrap(),
        0.0,
        true,
    )
    .unwrap();
    let h = spec.assemble().unwrap();
    let sim = exact_sim(&spec, &h, 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut psi = StateVector::basis(16, spec.layout().index(2, 0).unwrap()).unwrap();
    for _ in 0..10 {
        let (next, outcome) = sim.run_cycle(&psi, &mut rng).unwrap();
        assert_eq!(outcome.detected, 0);
        assert!(next.fidelity(&psi).unwrap() > 1.0 - 1e-12);
        psi = next;
    }
}

#[test]
fn grover_detection_lands_in_marked_state() {
    let lambda = 0.01;
    let p = GroverProblem::with_count(8, 1).unwrap();
    let marked = *p.marked().iter().next().unwrap();
    let spec = grover_model(&p, lambda).unwrap();
    let h = spec.assemble().unwrap();
    let duration = grover_rate(8, 1, lambda).unwrap().transfer_time();
    let sim = exact_sim(&spec, &h, duration);
    let layout = spec.layout();
    // Uniform over non-solutions, cavity empty.
    let amp = C64::new(1.0 / 255f64.sqrt(), 0.0);
    let mut system = vec![amp; 256];
    system[marked] = C64::new(0.0, 0.0);
    let (next, outcome) = sim.cycle_system(&system, 0.995).unwrap();
    assert_eq!(outcome.detected, 1);
    assert!(next[marked].norm_sqr() > 0.99);
    assert!(outcome.ground_population > 0.99);
    assert_eq!(layout.cavity_dim(), 2);
}

#[test]
fn quiet_stop_on_ground_start() {
    let p = GroverProblem::new(4, [5]).unwrap();
    let spec = grover_model(&p, 0.02).unwrap();
    let h = spec.assemble().unwrap();
    let sim = exact_sim(&spec, &h, PI / 0.04);
    let mut cfg = CoolingConfig::for_coupling(0.02, 100, 3);
    cfg.quiet_cycles_to_stop = 5;
    cfg.initial_state = InitialState::Basis(5);
    let t = sim.run_trajectory(&cfg).unwrap();
    assert_eq!(t.outcomes.len(), 5);
    assert_eq!(t.detections(), 0);
    assert_eq!(t.termination, Termination::QuietStop);
}

#[test]
fn reset_leaves_cavities_empty() {
    let spec = factoring_model(&FactoringProblem::new(15).unwrap(), 2, 0.1, true).unwrap();
    let h = spec.assemble().unwrap();
    let kernel = DirectKernel::new(&h, spec.layout(), 5.0, &EvolutionEngine::krylov(1e-10, 40)).unwrap();
    let sim = CoolingSimulator::new(kernel, &spec.problem).unwrap();
    let layout = spec.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut psi = StateVector::basis(layout.dim(), layout.index(300, 0).unwrap()).unwrap();
    for _ in 0..8 {
        let (next, _) = sim.run_cycle(&psi, &mut rng).unwrap();
        for (i, a) in next.amplitudes().iter().enumerate() {
            if i % layout.cavity_dim() != 0 {
                assert_eq!(*a, C64::new(0.0, 0.0));
            }
        }
        assert!((next.norm() - 1.0).abs() < 1e-12);
        psi = next;
    }
    let mut dirty = psi.into_amplitudes();
    dirty[1] = C64::new(0.5, 0.0);
    let dirty = StateVector::from_amplitudes(dirty).unwrap();
    assert!(sim.run_cycle(&dirty, &mut rng).is_err());
}

#[test]
fn seeds_reproduce_and_threads_do_not_matter() {
    let p = GroverProblem::with_count(5, 2).unwrap();
    let spec = grover_model(&p, 0.05).unwrap();
    let h = spec.assemble().unwrap();
    let sim = exact_sim(&spec, &h, PI / 0.1);
    let cfg = CoolingConfig::for_coupling(0.05, 25, 42);
    let a = sim.run_trajectory(&cfg).unwrap();
    let b = sim.run_trajectory(&cfg).unwrap();
    assert_eq!(a, b);
    let sequential = run_ensemble(&sim, &cfg, 16, Some(1)).unwrap();
    for threads in [Some(2), Some(4), None] {
        assert_eq!(run_ensemble(&sim, &cfg, 16, threads).unwrap(), sequential);
    }
    assert_eq!(sequential.trajectories[3].seed, trajectory_seed(42, 3));
    assert_eq!(trajectory_seed(0, 0), 0xE220A8397B1DCDAF);
}

#[test]
fn single_sample_stats_equal_trajectory() {
    let p = GroverProblem::with_count(3, 1).unwrap();
    let spec = grover_model(&p, 0.05).unwrap();
    let h = spec.assemble().unwrap();
    let sim = exact_sim(&spec, &h, PI / 0.1);
    let cfg = CoolingConfig::for_coupling(0.05, 10, 9);
    let ens = run_ensemble(&sim, &cfg, 1, Some(1)).unwrap();
    let t = &ens.trajectories[0];
    let stats = EnsembleStats::from_trajectories(std::slice::from_ref(t)).unwrap();
    assert_eq!(stats, ens.stats);
    assert_eq!(stats.mean_energy[0], t.initial_energy);
    for (k, o) in t.outcomes.iter().enumerate() {
        assert_eq!(stats.mean_energy[k + 1], o.post_energy);
        assert_eq!(stats.min_energy[k + 1], o.post_energy);
        assert_eq!(stats.max_energy[k + 1], o.post_energy);
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Fixture {
    seed: u64,
    cycles: usize,
    initial_energy: f64,
    detected: Vec<usize>,
    post_energy: Vec<f64>,
}

#[test]
fn factoring_trajectory_fixture() {
    let lambda = 0.1;
    let spec = factoring_model(&FactoringProblem::new(35).unwrap(), 3, lambda, true).unwrap();
    let h = spec.assemble().unwrap();
    let duration = PI / (2.0 * lambda);
    let kernel = DirectKernel::new(&h, spec.layout(), duration, &EvolutionEngine::krylov(1e-11, 40)).unwrap();
    let sim = CoolingSimulator::new(kernel, &spec.problem).unwrap();
    let cfg = CoolingConfig::for_coupling(lambda, 12, 7);
    let t = sim.run_trajectory(&cfg).unwrap();
    let current = Fixture {
        seed: cfg.seed,
        cycles: cfg.max_cycles,
        initial_energy: t.initial_energy,
        detected: t.outcomes.iter().map(|o| o.detected).collect(),
        post_energy: t.outcomes.iter().map(|o| o.post_energy).collect(),
    };
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/factoring_trajectory.json");
    let Ok(text) = std::fs::read_to_string(&path) else {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, serde_json::to_string_pretty(&current).unwrap()).unwrap();
        eprintln!("recorded fixture {}", path.display());
        return;
    };
    let recorded: Fixture = serde_json::from_str(&text).unwrap();
    assert_eq!((recorded.seed, recorded.cycles), (current.seed, current.cycles));
    assert_eq!(recorded.initial_energy, current.initial_energy);
    assert_eq!(recorded.detected, current.detected);
    for (a, b) in recorded.post_energy.iter().zip(&current.post_energy) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}
