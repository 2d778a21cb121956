mod common;

use iotrans::process_model::{random_unifilar, RandomSpecConfig};
use iotrans::{
    classical_complexity, compressed_states, condition_i_orthogonal, future_distribution,
    gram_matrix, is_stepwise_inefficient, minimize, quantum_complexity, refine_partition,
    trace_distance, Error, InputDistribution, InputPlan, TransducerSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::words;

fn spec_from_seed(seed: u64) -> TransducerSpec {
    random_unifilar(
        &mut ChaCha8Rng::seed_from_u64(seed),
        &RandomSpecConfig::default(),
    )
}

fn small_spec_from_seed(seed: u64) -> TransducerSpec {
    let cfg = RandomSpecConfig {
        max_states: 4,
        max_inputs: 2,
        max_outputs: 3,
        min_weight: 0.1,
    };
    random_unifilar(&mut ChaCha8Rng::seed_from_u64(seed), &cfg)
}

fn distribution(spec: &TransducerSpec, raw: &[f64]) -> InputDistribution {
    let w: Vec<f64> = raw.iter().take(spec.n_inputs()).copied().collect();
    let total: f64 = w.iter().sum();
    InputDistribution::new(spec, w.iter().map(|v| v / total).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn orthogonality_iff_no_inefficiency(seed in any::<u64>()) {
        let (spec, _) = minimize(&spec_from_seed(seed)).unwrap();
        prop_assert_eq!(condition_i_orthogonal(&spec), is_stepwise_inefficient(&spec).is_none());
    }

    #[test]
    fn minimization_preserves_futures(seed in any::<u64>()) {
        let spec = small_spec_from_seed(seed);
        let (min, part) = minimize(&spec).unwrap();
        for len in 0..=3 {
            for word in words(spec.n_inputs(), len) {
                for i in 0..spec.n_states() {
                    let a = future_distribution(&spec, i, InputPlan::Word(&word), len).unwrap();
                    let b = future_distribution(&min, part.class_of(i), InputPlan::Word(&word), len).unwrap();
                    prop_assert!(trace_distance(&a, &b).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn minimization_is_idempotent(seed in any::<u64>()) {
        let (once, _) = minimize(&spec_from_seed(seed)).unwrap();
        let (twice, part) = minimize(&once).unwrap();
        prop_assert!(part.is_identity());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn duplicating_a_state_changes_nothing_after_minimization(seed in any::<u64>(), pick in any::<usize>()) {
        let (min, _) = minimize(&spec_from_seed(seed)).unwrap();
        let dup = min.with_duplicated_state(pick % min.n_states()).unwrap();
        prop_assert_eq!(refine_partition(&dup).n_classes(), min.n_states());
    }

    #[test]
    fn quantum_memory_never_exceeds_classical(seed in any::<u64>(), raw in prop::collection::vec(0.05f64..1.0, 3)) {
        let (spec, _) = minimize(&spec_from_seed(seed)).unwrap();
        let dist = distribution(&spec, &raw);
        match (classical_complexity(&spec, &dist), quantum_complexity(&spec, &dist)) {
            (Ok(c), Ok(q)) => {
                prop_assert!(q <= c + 1e-9, "Q = {q} > C = {c}");
                prop_assert!(q >= -1e-12);
            }
            (Err(Error::ReducibleChain), Err(Error::ReducibleChain)) => {}
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn compressed_states_reproduce_the_gram_matrix(seed in any::<u64>()) {
        let (spec, _) = minimize(&spec_from_seed(seed)).unwrap();
        let g = gram_matrix(&spec).unwrap();
        let tau = compressed_states(&g);
        prop_assert_eq!(tau.dim(), g.rank());
        let diff = (tau.gram() - g.entries()).abs().max();
        prop_assert!(diff < 1e-9, "gram mismatch {diff}");
        for i in 0..g.len() {
            prop_assert!((g.get(i, i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn future_distributions_are_normalized(seed in any::<u64>(), len in 0usize..5) {
        let spec = small_spec_from_seed(seed);
        let word: Vec<usize> = (0..len).map(|k| (seed as usize >> k) % spec.n_inputs()).collect();
        for i in 0..spec.n_states() {
            let d = future_distribution(&spec, i, InputPlan::Word(&word), len).unwrap();
            prop_assert!((d.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_distance_is_a_bounded_symmetric_metric(seed in any::<u64>()) {
        let spec = small_spec_from_seed(seed);
        let word: Vec<usize> = (0..3).map(|k| (seed as usize >> (2 * k)) % spec.n_inputs()).collect();
        let d: Vec<_> = (0..spec.n_states())
            .map(|i| future_distribution(&spec, i, InputPlan::Word(&word), 3).unwrap())
            .collect();
        for a in &d {
            prop_assert!(trace_distance(a, a).unwrap().abs() < 1e-15);
            for b in &d {
                let ab = trace_distance(a, b).unwrap();
                prop_assert!((-1e-15..=1.0 + 1e-12).contains(&ab));
                prop_assert!((ab - trace_distance(b, a).unwrap()).abs() < 1e-15);
            }
        }
    }
}
