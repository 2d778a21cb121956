//! Explicit quantum realization of a transducer and its verification.
//!
//! The memory holds a quantum causal state `|s_i>` living in
//! `W = ω^{⊗|X|}`, with `ω = Σ ⊗ K` (output register times state register).
//! One step on input `x`:
//!
//! 1. selection `S_x`: discard every factor of `W` except the `x`-th,
//! 2. `B`: `|y>|k> -> |y>|τ_k>` on `ω`, as the Kraus family
//!    `K_k = 1_Σ ⊗ |τ_k><k|`,
//! 3. decompression `U`: `|τ_k> -> |s_k>`,
//! 4. measure `Σ` in the `|y>` basis and keep `W` as the next memory.
//!
//! Memories are tracked as ensembles of pure states so that mixing, if it
//! ever occurred, would show up in the recorded purity and fidelity.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classical_analysis::{FutureDistribution, HORIZON_CAP};
use crate::error::{Error, Result};
use crate::linalg::{
    basis, fidelity, guard, hermitian_eigenpairs, isometry_defect, kron, reduced_density, span_map,
    unitary_completion, CMatrix, CVector,
};
use crate::process_model::TransducerSpec;
use crate::quantum_model::{compressed_states, gram_matrix, CompressedStates};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

fn cr(a: f64) -> Complex64 {
    Complex64::new(a, 0.0)
}

/// Quantum causal state in product form: one component `|s_i^x>` per input.
#[derive(Debug, Clone, PartialEq)]
pub struct FullCausalState {
    components: Vec<CVector>,
}

impl FullCausalState {
    /// `|s_i^x>` on `ω`, basis index `y * n + k`.
    pub fn component(&self, x: usize) -> &CVector {
        &self.components[x]
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// `<self|other> = Π_x <self^x|other^x>`.
    pub fn overlap(&self, other: &FullCausalState) -> Complex64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.dotc(b))
            .product()
    }

    /// The state as one vector of `W`, first input most significant.
    pub fn materialize(&self) -> Result<CVector> {
        let dim = self
            .components
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
            .unwrap_or(usize::MAX);
        guard(dim)?;
        let mut psi = CVector::from_element(1, C1);
        for c in &self.components {
            psi = kron(&psi, c);
        }
        Ok(psi)
    }
}

pub fn build_full_states(spec: &TransducerSpec) -> Vec<FullCausalState> {
    let (n, ny) = (spec.n_states(), spec.n_outputs());
    (0..n)
        .map(|i| FullCausalState {
            components: (0..spec.n_inputs())
                .map(|x| {
                    CVector::from_fn(ny * n, |idx, _| {
                        let (y, k) = (idx / n, idx % n);
                        cr(spec.prob(i, x, y, k).sqrt())
                    })
                })
                .collect(),
        })
        .collect()
}

/// Ensemble of pure states: `(weight, normalized vector)`.
pub type Ensemble = Vec<(f64, CVector)>;

/// Per-step check of the retained memory against `|s_g(i,x,y)>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub fidelity: f64,
    pub purity: f64,
}

/// Outcome `y` of one step: its probability and the post-measurement memory.
#[derive(Debug, Clone)]
pub struct Branch {
    pub output: usize,
    pub prob: f64,
    pub memory: Ensemble,
}

/// Branches with less probability than this are dropped.
const BRANCH_FLOOR: f64 = 1e-14;

/// All operators of the quantum transducer for one spec.
#[derive(Debug, Clone)]
pub struct CircuitRealization {
    spec: TransducerSpec,
    full_states: Vec<FullCausalState>,
    materialized: Vec<CVector>,
    compressed: CompressedStates,
    kraus: Vec<CMatrix>,
    decompression: CMatrix,
}

/// Builds the selection, `B` and decompression operators, refusing if `W`
/// exceeds the amplitude limit.
pub fn build_realization(spec: &TransducerSpec) -> Result<CircuitRealization> {
    let (n, ny) = (spec.n_states(), spec.n_outputs());
    let full_states = build_full_states(spec);
    let materialized = full_states
        .iter()
        .map(FullCausalState::materialize)
        .collect::<Result<Vec<_>>>()?;
    let compressed = compressed_states(&gram_matrix(spec)?);
    let r = compressed.dim();

    let kraus: Vec<CMatrix> = (0..n)
        .map(|k| {
            let tau = compressed.vector(k);
            let mut m = CMatrix::zeros(ny * r, ny * n);
            for y in 0..ny {
                for a in 0..r {
                    m[(y * r + a, y * n + k)] = tau[a];
                }
            }
            m
        })
        .collect();

    let sources: Vec<CVector> = (0..n).map(|k| compressed.vector(k)).collect();
    guard(materialized[0].len() * r)?;
    let decompression = span_map(&sources, &materialized, 1e-9)?;
    let defect = isometry_defect(&decompression);
    if defect > 1e-9 {
        return Err(Error::NumericalRankFailure(format!(
            "decompression deviates from an isometry by {defect:.3e}"
        )));
    }
    for (k, (src, dst)) in sources.iter().zip(&materialized).enumerate() {
        let miss = (&decompression * src - dst).norm();
        if miss > 1e-9 {
            return Err(Error::NumericalRankFailure(format!(
                "decompression misses |s_{k}> by {miss:.3e}"
            )));
        }
    }
    Ok(CircuitRealization {
        spec: spec.clone(),
        full_states,
        materialized,
        compressed,
        kraus,
        decompression,
    })
}

impl CircuitRealization {
    pub fn spec(&self) -> &TransducerSpec {
        &self.spec
    }

    pub fn full_states(&self) -> &[FullCausalState] {
        &self.full_states
    }

    pub fn compressed(&self) -> &CompressedStates {
        &self.compressed
    }

    /// Kraus operators `K_k = 1_Σ ⊗ |τ_k><k|` of `B`.
    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `|s_i>` as a vector of `W`.
    pub fn causal_state(&self, i: usize) -> &CVector {
        &self.materialized[i]
    }

    /// `dim W`.
    pub fn memory_dim(&self) -> usize {
        self.materialized[0].len()
    }

    /// Isometry from the compressed space into `W` with `|τ_k> -> |s_k>`.
    pub fn decompression(&self) -> &CMatrix {
        &self.decompression
    }

    /// `‖Σ_k K_k^† K_k - 1‖_max`.
    pub fn kraus_completeness_defect(&self) -> f64 {
        let d = self.kraus[0].ncols();
        let sum = self
            .kraus
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        (sum - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Full unitary on `W`: compressed states are embedded as `|τ_k>|0>`
    /// (the first `rank` coordinates) and sent to `|s_k>`; the rest of the
    /// basis is completed by Gram-Schmidt.
    pub fn decompression_unitary(&self) -> Result<CMatrix> {
        let dim = self.memory_dim();
        let sources: Vec<CVector> = (0..self.spec.n_states())
            .map(|k| {
                let tau = self.compressed.vector(k);
                let mut v = CVector::zeros(dim);
                v.rows_mut(0, tau.len()).copy_from(&tau);
                v
            })
            .collect();
        unitary_completion(&sources, &self.materialized, 1e-9)
    }

    fn dims(&self) -> Vec<usize> {
        let d = self.spec.n_outputs() * self.spec.n_states();
        vec![d; self.spec.n_inputs()]
    }

    /// The map `|y>|k> -> |y>|τ_k>` as a single linear operator.
    fn b_map(&self) -> CMatrix {
        self.kraus.iter().fold(
            CMatrix::zeros(self.kraus[0].nrows(), self.kraus[0].ncols()),
            |acc, k| acc + k,
        )
    }

    /// `(1_Σ ⊗ U) B` applied to a vector of `ω`; the result lives on `Σ ⊗ W`
    /// with the output register most significant.
    pub fn composite_step(&self, omega: &CVector) -> CVector {
        let phi = self.b_map() * omega;
        self.decompress(&phi)
    }

    fn decompress(&self, phi: &CVector) -> CVector {
        let r = self.compressed.dim();
        let dim = self.memory_dim();
        let mut out = CVector::zeros(self.spec.n_outputs() * dim);
        for y in 0..self.spec.n_outputs() {
            let block = &self.decompression * phi.rows(y * r, r);
            out.rows_mut(y * dim, dim).copy_from(&block);
        }
        out
    }

    /// Selection `S_x`: the reduced state of factor `x`, as an ensemble.
    pub fn select(&self, psi: &CVector, x: usize) -> Ensemble {
        hermitian_eigenpairs(&reduced_density(psi, &self.dims(), x), 1e-14)
    }

    /// One step of the transducer on input `x`, returning every output branch.
    pub fn step(&self, memory: &Ensemble, x: usize) -> Vec<Branch> {
        let ny = self.spec.n_outputs();
        let dim = self.memory_dim();
        let mut branches: Vec<Branch> = (0..ny)
            .map(|y| Branch {
                output: y,
                prob: 0.0,
                memory: Vec::new(),
            })
            .collect();
        for (w, psi) in memory {
            for (lambda, omega) in self.select(psi, x) {
                for k in &self.kraus {
                    let phi = k * &omega;
                    if phi.norm_squared() == 0.0 {
                        continue;
                    }
                    let out = self.decompress(&phi);
                    for (y, branch) in branches.iter_mut().enumerate() {
                        let block = out.rows(y * dim, dim);
                        let norm2 = block.norm_squared();
                        let weight = w * lambda * norm2;
                        if weight > 0.0 {
                            branch.prob += weight;
                            branch
                                .memory
                                .push((weight, block.into_owned() / cr(norm2.sqrt())));
                        }
                    }
                }
            }
        }
        branches.retain(|b| b.prob > BRANCH_FLOOR);
        for b in &mut branches {
            let p = b.prob;
            b.memory.iter_mut().for_each(|(w, _)| *w /= p);
        }
        branches
    }

    /// Fidelity of an ensemble memory with the pure state `target`.
    pub fn ensemble_fidelity(memory: &Ensemble, target: &CVector) -> f64 {
        memory.iter().map(|(w, v)| w * fidelity(target, v)).sum()
    }

    /// `Tr ρ²` of an ensemble.
    pub fn ensemble_purity(memory: &Ensemble) -> f64 {
        let mut s = 0.0;
        for (wa, a) in memory {
            for (wb, b) in memory {
                s += wa * wb * fidelity(a, b);
            }
        }
        s
    }

    fn record(&self, memory: &Ensemble, classical_next: Option<usize>) -> StepRecord {
        StepRecord {
            fidelity: classical_next
                .map(|j| Self::ensemble_fidelity(memory, &self.materialized[j]))
                .unwrap_or(0.0),
            purity: Self::ensemble_purity(memory),
        }
    }

    /// Exact output-word distribution of the circuit from `|s_initial>`,
    /// together with a [`StepRecord`] for every branch step.
    pub fn enumerate(
        &self,
        initial: usize,
        inputs: &[usize],
    ) -> Result<(FutureDistribution, Vec<StepRecord>)> {
        if inputs.len() > HORIZON_CAP {
            return Err(Error::HorizonTooLarge {
                horizon: inputs.len(),
                cap: HORIZON_CAP,
            });
        }
        let mut probs = BTreeMap::new();
        let mut records = Vec::new();
        let start: Ensemble = vec![(1.0, self.materialized[initial].clone())];
        let mut stack: Vec<(Ensemble, Option<usize>, Vec<usize>, f64)> =
            vec![(start, Some(initial), Vec::new(), 1.0)];
        while let Some((memory, classical, word, weight)) = stack.pop() {
            if word.len() == inputs.len() {
                *probs.entry(word).or_insert(0.0) += weight;
                continue;
            }
            let x = inputs[word.len()];
            for branch in self.step(&memory, x) {
                let next =
                    classical.and_then(|i| self.spec.successor(i, x, branch.output).map(|s| s.0));
                records.push(self.record(&branch.memory, next));
                let mut w = word.clone();
                w.push(branch.output);
                stack.push((branch.memory, next, w, weight * branch.prob));
            }
        }
        Ok((
            FutureDistribution {
                horizon: inputs.len(),
                n_outputs: self.spec.n_outputs(),
                probs,
            },
            records,
        ))
    }

    /// One sampled run of the circuit.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        initial: usize,
        inputs: &[usize],
        rng: &mut R,
    ) -> (Vec<usize>, Vec<StepRecord>) {
        let mut memory: Ensemble = vec![(1.0, self.materialized[initial].clone())];
        let mut classical = Some(initial);
        let mut outputs = Vec::with_capacity(inputs.len());
        let mut records = Vec::with_capacity(inputs.len());
        for &x in inputs {
            let branches = self.step(&memory, x);
            let total: f64 = branches.iter().map(|b| b.prob).sum();
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = branches.len() - 1;
            for (idx, b) in branches.iter().enumerate() {
                if u < b.prob {
                    chosen = idx;
                    break;
                }
                u -= b.prob;
            }
            let branch = branches
                .into_iter()
                .nth(chosen)
                .expect("at least one branch");
            classical =
                classical.and_then(|i| self.spec.successor(i, x, branch.output).map(|s| s.0));
            records.push(self.record(&branch.memory, classical));
            outputs.push(branch.output);
            memory = branch.memory;
        }
        (outputs, records)
    }
}

/// Exact output distribution of the quantum transducer started in `|s_initial>`.
pub fn exact_output_distribution_quantum(
    spec: &TransducerSpec,
    initial: usize,
    inputs: &[usize],
) -> Result<FutureDistribution> {
    Ok(build_realization(spec)?.enumerate(initial, inputs)?.0)
}

/// A single sampled trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRun {
    pub seed: u64,
    pub initial: usize,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub fidelities: Vec<f64>,
}

pub fn simulate_quantum(
    spec: &TransducerSpec,
    initial: usize,
    inputs: &[usize],
    seed: u64,
) -> Result<SimRun> {
    let real = build_realization(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (outputs, records) = real.sample(initial, inputs, &mut rng);
    Ok(SimRun {
        seed,
        initial,
        inputs: inputs.to_vec(),
        outputs,
        fidelities: records.iter().map(|r| r.fidelity).collect(),
    })
}

/// Empirical output-word frequencies over `samples` runs from one seed.
pub fn sample_output_frequencies(
    real: &CircuitRealization,
    initial: usize,
    inputs: &[usize],
    seed: u64,
    samples: usize,
) -> (BTreeMap<Vec<usize>, usize>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    let mut min_fidelity = 1.0f64;
    for _ in 0..samples {
        let (outputs, records) = real.sample(initial, inputs, &mut rng);
        for r in &records {
            min_fidelity = min_fidelity.min(r.fidelity);
        }
        *counts.entry(outputs).or_insert(0) += 1;
    }
    (counts, min_fidelity)
}

/// Four-qubit circuit for the actively perturbed coin.
///
/// The memory is one qubit holding `|s_0> = sqrt(r)|0> + sqrt(1-r)|1>` or
/// `|s_1> = |0>` with `r = 16 p q (1-p)(1-q)`. Three ancillas in `|0>` are
/// appended and `U` maps `|s_j>|000>` to `|s'_0> = |φ_p>|φ_q>` or
/// `|s'_1> = X⊗X⊗X⊗X |s'_0>`, with `|φ_a> = sqrt(1-a)|00> + sqrt(a)|11>`.
/// Input `0` discards qubits 1 and 2, input `1` discards qubits 3 and 4. The
/// remaining pair goes through `V: |00> -> |0>|s_0>, |11> -> |1>|s_1>`; its
/// first qubit is the output and the second the next memory.
#[derive(Debug, Clone)]
pub struct CoinDilation {
    pub p: f64,
    pub q: f64,
    memory: [CVector; 2],
    primed: [CVector; 2],
    unitary: CMatrix,
    v: CMatrix,
}

fn qubits(bits: &[usize]) -> CVector {
    let idx = bits.iter().fold(0, |acc, &b| acc * 2 + b);
    basis(1 << bits.len(), idx)
}

pub fn perturbed_coin_circuit(p: f64, q: f64) -> Result<CoinDilation> {
    for (name, value) in [("p", p), ("q", q)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ParameterOutOfRange { name, value });
        }
    }
    let r = 16.0 * p * q * (1.0 - p) * (1.0 - q);
    let s0 = CVector::from_vec(vec![cr(r.sqrt()), cr((1.0 - r).max(0.0).sqrt())]);
    let s1 = CVector::from_vec(vec![C1, C0]);
    let phi = |a: f64| qubits(&[0, 0]) * cr((1.0 - a).sqrt()) + qubits(&[1, 1]) * cr(a.sqrt());
    let primed0 = kron(&phi(p), &phi(q));
    let flip_all = CMatrix::from_fn(16, 16, |a, b| if a == 15 - b { C1 } else { C0 });
    let primed1 = &flip_all * &primed0;
    let ancilla = qubits(&[0, 0, 0]);
    let unitary = unitary_completion(
        &[kron(&s0, &ancilla), kron(&s1, &ancilla)],
        &[primed0.clone(), primed1.clone()],
        1e-12,
    )?;
    let v = unitary_completion(
        &[qubits(&[0, 0]), qubits(&[1, 1])],
        &[kron(&qubits(&[0]), &s0), kron(&qubits(&[1]), &s1)],
        1e-12,
    )?;
    Ok(CoinDilation {
        p,
        q,
        memory: [s0, s1],
        primed: [primed0, primed1],
        unitary,
        v,
    })
}

impl CoinDilation {
    /// One-qubit memory state of coin face `j`.
    pub fn memory_state(&self, j: usize) -> &CVector {
        &self.memory[j]
    }

    /// `|s'_j>`.
    pub fn dilated_state(&self, j: usize) -> &CVector {
        &self.primed[j]
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// `<s'_0|s'_1>`.
    pub fn overlap(&self) -> f64 {
        self.primed[0].dotc(&self.primed[1]).re
    }

    /// One step from a one-qubit memory: for each output, its probability and
    /// the ensemble left on the retained qubit.
    pub fn step(&self, memory: &CVector, x: usize) -> Vec<(f64, Ensemble)> {
        let psi = &self.unitary * kron(memory, &qubits(&[0, 0, 0]));
        // pairs (B1 B2) and (B3 B4); input 0 keeps the second pair
        let keep = if x == 0 { 1 } else { 0 };
        let kept = hermitian_eigenpairs(&reduced_density(&psi, &[4, 4], keep), 1e-14);
        let mut out: Vec<(f64, Ensemble)> = vec![(0.0, Vec::new()), (0.0, Vec::new())];
        for (lambda, pair) in kept {
            let rotated = &self.v * pair;
            for (y, slot) in out.iter_mut().enumerate() {
                let c2 = rotated.rows(2 * y, 2).into_owned();
                let norm2 = c2.norm_squared();
                if norm2 > 0.0 {
                    slot.0 += lambda * norm2;
                    slot.1.push((lambda * norm2, c2 / cr(norm2.sqrt())));
                }
            }
        }
        for (p, ens) in &mut out {
            if *p > 0.0 {
                ens.iter_mut().for_each(|(w, _)| *w /= *p);
            }
        }
        out
    }

    /// `P(y | face j, input x)`.
    pub fn conditional(&self, j: usize, x: usize) -> [f64; 2] {
        let s = self.step(&self.memory[j], x);
        [s[0].0, s[1].0]
    }

    /// Unitarity defects of `U` and `V`.
    pub fn unitarity_defect(&self) -> f64 {
        isometry_defect(&self.unitary).max(isometry_defect(&self.v))
    }
}

/// Conditional output distribution of one general-circuit step from `|s_i>`.
pub fn step_distribution(real: &CircuitRealization, i: usize, x: usize) -> Vec<f64> {
    let mut probs = vec![0.0; real.spec().n_outputs()];
    for b in real.step(&vec![(1.0, real.causal_state(i).clone())], x) {
        probs[b.output] = b.prob;
    }
    probs
}

/// Isometry defect of the decompression map.
pub fn isometry_check(real: &CircuitRealization) -> f64 {
    isometry_defect(real.decompression())
}

/// Real part of every entry, for display.
pub fn real_part(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical_analysis::{future_distribution, trace_distance, InputPlan};
    use crate::process_model::{
        actively_perturbed_coin, constant_machine, disjoint_output_machine,
    };
    use crate::quantum_model::quantum_overlap;
    use approx::assert_abs_diff_eq;

    #[test]
    fn coin_component_overlap() {
        let (p, q) = (0.25, 0.25);
        let states = build_full_states(&actively_perturbed_coin(p, q).unwrap());
        let o = states[0].component(1).dotc(states[1].component(1)).re;
        assert_abs_diff_eq!(o, 2.0 * (p * (1.0 - p)).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(o, 0.866_025_403_784_438_6, epsilon = 1e-12);
        for s in &states {
            assert_abs_diff_eq!(s.overlap(s).re, 1.0, epsilon = 1e-12);
            for x in 0..2 {
                assert_abs_diff_eq!(s.component(x).norm(), 1.0, epsilon = 1e-12);
            }
        }
        let disjoint = build_full_states(&disjoint_output_machine());
        assert_eq!(disjoint[0].overlap(&disjoint[1]).norm(), 0.0);
    }

    #[test]
    fn full_state_overlaps_reproduce_gram() {
        let spec = actively_perturbed_coin(0.3, 0.2).unwrap();
        let states = build_full_states(&spec);
        let psi0 = states[0].materialize().unwrap();
        let psi1 = states[1].materialize().unwrap();
        assert_eq!(psi0.len(), 16);
        assert_abs_diff_eq!(
            psi0.dotc(&psi1).re,
            quantum_overlap(&spec, 0, 1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn composite_step_amplitudes() {
        let q = 0.25;
        let spec = actively_perturbed_coin(0.25, q).unwrap();
        let real = build_realization(&spec).unwrap();
        let out = real.composite_step(real.full_states()[0].component(0));
        let dim = real.memory_dim();
        let on_0_s0 = out.rows(0, dim).dotc(real.causal_state(0));
        let on_1_s1 = out.rows(dim, dim).dotc(real.causal_state(1));
        assert_abs_diff_eq!(on_0_s0.re, (1.0 - q).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(on_1_s1.re, q.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn operators_are_unitary_and_complete() {
        for spec in [
            actively_perturbed_coin(0.3, 0.2).unwrap(),
            disjoint_output_machine(),
        ] {
            let real = build_realization(&spec).unwrap();
            assert!(real.kraus_completeness_defect() < 1e-12);
            let u = real.decompression_unitary().unwrap();
            assert!(isometry_defect(&u) < 1e-9);
        }
    }

    #[test]
    fn orthogonal_states_decompress_to_basis_images() {
        let real = build_realization(&disjoint_output_machine()).unwrap();
        let u = real.decompression();
        // τ = standard basis, so the columns of U are the causal states
        assert_eq!(real.compressed().dim(), 2);
        for k in 0..2 {
            assert_abs_diff_eq!(
                (u.column(k) - real.causal_state(k)).norm(),
                0.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn post_measurement_state_is_the_next_causal_state() {
        let spec = actively_perturbed_coin(0.3, 0.2).unwrap();
        let real = build_realization(&spec).unwrap();
        for i in 0..2 {
            for x in 0..2 {
                for b in real.step(&vec![(1.0, real.causal_state(i).clone())], x) {
                    let g = spec.successor(i, x, b.output).unwrap().0;
                    let f = CircuitRealization::ensemble_fidelity(&b.memory, real.causal_state(g));
                    assert!(f >= 1.0 - 1e-9, "fidelity {f}");
                    assert!(CircuitRealization::ensemble_purity(&b.memory) >= 1.0 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn quantum_matches_classical_on_coin_words() {
        let spec = actively_perturbed_coin(0.3, 0.2).unwrap();
        let real = build_realization(&spec).unwrap();
        for word in [vec![], vec![0], vec![1, 0], vec![0, 1, 1, 0]] {
            for i in 0..2 {
                let (qd, _) = real.enumerate(i, &word).unwrap();
                let cd = future_distribution(&spec, i, InputPlan::Word(&word), word.len()).unwrap();
                assert!(trace_distance(&qd, &cd).unwrap() <= 1e-9);
            }
        }
        let (empty, _) = real.enumerate(0, &[]).unwrap();
        assert_eq!(empty.prob(&[]), 1.0);
    }

    #[test]
    fn deterministic_machines_give_point_masses() {
        let d =
            exact_output_distribution_quantum(&disjoint_output_machine(), 1, &[0, 1, 0]).unwrap();
        assert_abs_diff_eq!(d.prob(&[1, 1, 1]), 1.0, epsilon = 1e-12);
        let run = simulate_quantum(&constant_machine(), 0, &[0, 1, 1, 0], 7).unwrap();
        assert_eq!(run.outputs, vec![0, 0, 0, 0]);
        assert!(run.fidelities.iter().all(|&f| (f - 1.0).abs() < 1e-12));
    }

    #[test]
    fn horizon_cap_is_enforced() {
        let real = build_realization(&constant_machine()).unwrap();
        assert!(matches!(
            real.enumerate(0, &[0; 13]),
            Err(Error::HorizonTooLarge { .. })
        ));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let spec = actively_perturbed_coin(0.3, 0.2).unwrap();
        let a = simulate_quantum(&spec, 0, &[0, 1, 1, 0, 1], 11).unwrap();
        let b = simulate_quantum(&spec, 0, &[0, 1, 1, 0, 1], 11).unwrap();
        assert_eq!(a, b);
        assert!(a.fidelities.iter().all(|&f| f >= 1.0 - 1e-9));
    }

    #[test]
    fn coin_dilation_overlap_and_statistics() {
        let (p, q) = (0.3, 0.2);
        let c = perturbed_coin_circuit(p, q).unwrap();
        let r: f64 = 16.0 * p * q * (1.0 - p) * (1.0 - q);
        assert_abs_diff_eq!(c.overlap(), r.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(
            c.overlap(),
            4.0 * (p * (1.0 - p) * q * (1.0 - q)).sqrt(),
            epsilon = 1e-12
        );
        assert!(c.unitarity_defect() < 1e-12);
        assert_abs_diff_eq!(c.conditional(0, 0)[1], q, epsilon = 1e-12);
        assert_abs_diff_eq!(c.conditional(0, 1)[1], p, epsilon = 1e-12);
        assert_abs_diff_eq!(c.conditional(1, 0)[0], q, epsilon = 1e-12);
        // the retained qubit is the next memory state
        for j in 0..2 {
            for x in 0..2 {
                for (y, (_, ens)) in c.step(c.memory_state(j), x).into_iter().enumerate() {
                    let f = CircuitRealization::ensemble_fidelity(&ens, c.memory_state(y));
                    assert!(f >= 1.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn coin_dilation_symmetric_when_p_equals_q() {
        let c = perturbed_coin_circuit(0.35, 0.35).unwrap();
        for j in 0..2 {
            let a = c.conditional(j, 0);
            let b = c.conditional(j, 1);
            assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-12);
        }
        assert!(matches!(
            perturbed_coin_circuit(1.0, 0.3),
            Err(Error::ParameterOutOfRange { .. })
        ));
    }
}
