use cqc_core::model::BasisLayout;
use cqc_core::protocol::sample_pattern;
use cqc_core::{EvolutionEngine, SparseHermitian, StateVector, C64};
use proptest::prelude::*;

fn hermitian(dim: usize, diag: Vec<f64>, off: Vec<(usize, usize, f64, f64)>) -> SparseHermitian {
    let mut triplets: Vec<_> = diag.into_iter().enumerate().map(|(i, d)| (i, i, C64::new(d, 0.0))).collect();
    for (i, j, re, im) in off {
        let (i, j) = (i % dim, j % dim);
        if i == j {
            continue;
        }
        triplets.push((i, j, C64::new(re, im)));
        triplets.push((j, i, C64::new(re, -im)));
    }
    SparseHermitian::from_triplets(dim, triplets).unwrap()
}

fn instance() -> impl Strategy<Value = (SparseHermitian, StateVector)> {
    (2usize..=64).prop_flat_map(|dim| {
        (
            prop::collection::vec(-3.0..3.0f64, dim),
            prop::collection::vec((0..dim, 0..dim, -1.0..1.0f64, -1.0..1.0f64), 0..3 * dim),
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim),
        )
            .prop_filter_map("zero state", move |(diag, off, amps)| {
                let h = hermitian(dim, diag, off);
                let psi = StateVector::from_amplitudes(amps.into_iter().map(|(a, b)| C64::new(a, b)).collect()).ok()?;
                Some((h, psi))
            })
    })
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_is_unitary((h, psi) in instance()) {
        for engine in [EvolutionEngine::exact(), EvolutionEngine::krylov(1e-12, 30), EvolutionEngine::chebyshev(1e-12)] {
            let prop = engine.prepare(&h).unwrap();
            for t in [0.1, 1.0, 10.0] {
                let out = prop.evolve_amplitudes(psi.amplitudes(), t).unwrap();
                let norm: f64 = out.iter().map(|a| a.norm_sqr()).sum();
                prop_assert!((norm.sqrt() - 1.0).abs() < 1e-10, "norm {} at t {}", norm, t);
            }
        }
    }

    #[test]
    fn engines_agree_with_exact((h, psi) in instance()) {
        let exact = EvolutionEngine::exact().prepare(&h).unwrap();
        for engine in [EvolutionEngine::krylov(1e-12, 30), EvolutionEngine::chebyshev(1e-12)] {
            let other = engine.prepare(&h).unwrap();
            for t in [0.1, 1.0, 10.0] {
                let a = exact.evolve_amplitudes(psi.amplitudes(), t).unwrap();
                let b = other.evolve_amplitudes(psi.amplitudes(), t).unwrap();
                prop_assert!(distance(&a, &b) < 1e-8, "{:?} differs by {} at t {}", engine.method, distance(&a, &b), t);
            }
        }
    }

    #[test]
    fn evolution_composes((h, psi) in instance(), t1 in 0.0..5.0f64, t2 in 0.0..5.0f64) {
        let prop = EvolutionEngine::krylov(1e-12, 30).prepare(&h).unwrap();
        let once = prop.evolve_amplitudes(psi.amplitudes(), t1 + t2).unwrap();
        let mid = prop.evolve_amplitudes(psi.amplitudes(), t1).unwrap();
        let twice = prop.evolve_amplitudes(&mid, t2).unwrap();
        prop_assert!(distance(&once, &twice) < 1e-9);
    }

    #[test]
    fn triplet_construction_is_hermitian((h, _) in instance()) {
        prop_assert!(h.check_hermitian().is_ok());
        for (i, j, v) in h.triplets() {
            // Duplicate triplets are summed in row order, so allow rounding.
            prop_assert!((h.get(j, i) - v.conj()).norm() <= 1e-14);
        }
    }

    #[test]
    fn basis_index_round_trips(n in 0usize..6, m in 0usize..5) {
        let layout = BasisLayout::new(1 << n, m);
        for i in 0..layout.dim() {
            let (z, b) = layout.split(i).unwrap();
            prop_assert_eq!(layout.index(z, b).unwrap(), i);
        }
        prop_assert!(layout.index(1 << n, 0).is_err());
        prop_assert!(layout.index(0, 1 << m).is_err());
    }

    #[test]
    fn sampling_respects_support(weights in prop::collection::vec(0.0..1.0f64, 1..16), u in 0.0..1.0f64) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-6);
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let k = sample_pattern(&probs, u);
        prop_assert!(k < probs.len());
        prop_assert!(probs[k] > 0.0);
    }
}
