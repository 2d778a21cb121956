//! Merging states with identical future input-output behaviour.
//!
//! For a jointly unifilar machine two states are equivalent exactly when, for
//! every input, they induce the same distribution over (output, successor
//! class). Iterating that split from the one-class partition reaches the
//! coarsest stable partition, whose classes are the causal states.

use crate::error::{Error, Result};
use crate::process_model::{Alphabet, TransducerSpec, EPS_PROB};

/// A partition of the states of a spec. Classes are numbered by their
/// smallest member, and members are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Partition {
    pub fn from_class_of(class_of: Vec<usize>) -> Self {
        // renumber so that class ids follow the smallest member
        let mut remap: Vec<Option<usize>> = vec![None; class_of.len()];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut canonical = Vec::with_capacity(class_of.len());
        for (state, &c) in class_of.iter().enumerate() {
            if c >= remap.len() {
                remap.resize(c + 1, None);
            }
            let id = *remap[c].get_or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[id].push(state);
            canonical.push(id);
        }
        Self {
            class_of: canonical,
            classes,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_class_of((0..n).collect())
    }

    pub fn class_of(&self, state: usize) -> usize {
        self.class_of[state]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn n_states(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_identity(&self) -> bool {
        self.classes.len() == self.class_of.len()
    }
}

/// For every input, the probability of each (output, successor class) pair.
fn signature(
    spec: &TransducerSpec,
    state: usize,
    class_of: &[usize],
    n_classes: usize,
) -> Vec<f64> {
    let (nx, ny, n) = (spec.n_inputs(), spec.n_outputs(), spec.n_states());
    let mut sig = vec![0.0; nx * ny * n_classes];
    for x in 0..nx {
        for y in 0..ny {
            for j in 0..n {
                sig[(x * ny + y) * n_classes + class_of[j]] += spec.prob(state, x, y, j);
            }
        }
    }
    sig
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(u, v)| (u - v).abs() <= EPS_PROB)
}

/// Coarsest partition stable under splitting by (input → distribution over
/// (output, class)) signatures.
pub fn refine_partition(spec: &TransducerSpec) -> Partition {
    let n = spec.n_states();
    let mut part = Partition::from_class_of(vec![0; n]);
    loop {
        let k = part.n_classes();
        let sigs: Vec<Vec<f64>> = (0..n)
            .map(|s| signature(spec, s, &part.class_of, k))
            .collect();
        let mut next = vec![usize::MAX; n];
        let mut n_next = 0;
        for class in &part.classes {
            // each new block is led by its smallest member
            let mut leaders: Vec<usize> = Vec::new();
            for &s in class {
                match leaders.iter().position(|&l| close(&sigs[l], &sigs[s])) {
                    Some(b) => next[s] = next[leaders[b]],
                    None => {
                        leaders.push(s);
                        next[s] = n_next;
                        n_next += 1;
                    }
                }
            }
        }
        let refined = Partition::from_class_of(next);
        if refined.n_classes() == k {
            return refined;
        }
        part = refined;
    }
}

/// Collapses each class of `part` into one state. Rows of the quotient are
/// the average of the members' rows, which must agree within tolerance.
pub fn quotient(spec: &TransducerSpec, part: &Partition) -> Result<TransducerSpec> {
    if part.n_states() != spec.n_states() {
        return Err(Error::InconsistentPartition(format!(
            "partition covers {} states, spec has {}",
            part.n_states(),
            spec.n_states()
        )));
    }
    let k = part.n_classes();
    let (nx, ny) = (spec.n_inputs(), spec.n_outputs());
    let mut tensor = vec![0.0; k * nx * ny * k];
    for (c, members) in part.classes.iter().enumerate() {
        let sigs: Vec<Vec<f64>> = members
            .iter()
            .map(|&s| signature(spec, s, &part.class_of, k))
            .collect();
        if let Some(bad) = sigs.iter().position(|s| !close(s, &sigs[0])) {
            return Err(Error::InconsistentPartition(format!(
                "states {} and {} behave differently",
                spec.states().label(members[0]),
                spec.states().label(members[bad])
            )));
        }
        let weight = 1.0 / members.len() as f64;
        for sig in &sigs {
            let row = &mut tensor[c * nx * ny * k..(c + 1) * nx * ny * k];
            for (t, v) in row.iter_mut().zip(sig) {
                *t += weight * v;
            }
        }
    }
    let labels: Vec<String> = part
        .classes
        .iter()
        .map(|members| {
            members
                .iter()
                .map(|&s| spec.states().label(s))
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    TransducerSpec::from_tensor(
        spec.inputs().clone(),
        spec.outputs().clone(),
        Alphabet::new(labels)?,
        tensor,
    )
}

/// The ε-transducer presentation of `spec`, with the partition that produced it.
pub fn minimize(spec: &TransducerSpec) -> Result<(TransducerSpec, Partition)> {
    let part = refine_partition(spec);
    let min = quotient(spec, &part)?;
    Ok((min, part))
}
