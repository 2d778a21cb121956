#![allow(dead_code)]

use iotrans::process_model::{random_unifilar, RandomSpecConfig};
use iotrans::{minimize, TransducerSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest trace distance any adaptive input strategy of exactly `depth`
/// steps achieves between the output histories of states `i` and `j`.
///
/// Leaf masses `a` and `b` are the probabilities of one `(x, y)` history
/// under each hypothesis. Subtrees below different histories are chosen
/// independently, so the optimum is a plain max-sum recursion.
pub fn best_adaptive_distance(spec: &TransducerSpec, i: usize, j: usize, depth: usize) -> f64 {
    fn go(
        spec: &TransducerSpec,
        a: (Option<usize>, f64),
        b: (Option<usize>, f64),
        depth: usize,
    ) -> f64 {
        if depth == 0 || (a.1 == 0.0 && b.1 == 0.0) {
            return 0.5 * (a.1 - b.1).abs();
        }
        (0..spec.n_inputs())
            .map(|x| {
                (0..spec.n_outputs())
                    .map(|y| {
                        let next = |(s, m): (Option<usize>, f64)| match s
                            .and_then(|s| spec.successor(s, x, y))
                        {
                            Some((k, p)) => (Some(k), m * p),
                            None => (None, 0.0),
                        };
                        go(spec, next(a), next(b), depth - 1)
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
    go(spec, (Some(i), 1.0), (Some(j), 1.0), depth)
}

/// Seeded minimal random transducers.
pub fn random_minimal_specs(
    count: usize,
    seed: u64,
    config: &RandomSpecConfig,
) -> Vec<TransducerSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            minimize(&random_unifilar(&mut rng, config))
                .expect("minimizes")
                .0
        })
        .collect()
}

/// Every word of length `len` over `alphabet` symbols.
pub fn words(alphabet: usize, len: usize) -> Vec<Vec<usize>> {
    (0..alphabet.pow(len as u32))
        .map(|mut code| {
            let mut w = vec![0; len];
            for slot in w.iter_mut().rev() {
                *slot = code % alphabet;
                code /= alphabet;
            }
            w
        })
        .collect()
}
