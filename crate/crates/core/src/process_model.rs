//! Finite-state transducer presentations of input-output processes.
//!
//! A [`TransducerSpec`] holds the transition tensor `T[i][x][y][j]`: the
//! probability that the machine in state `i`, fed input `x`, emits `y` and
//! moves to `j`. Every spec that leaves this module has been validated:
//! rows are normalized, entries are non-negative and the machine is jointly
//! unifilar, so `(i, x, y)` fixes the successor.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for every zero and normalization test.
pub const EPS_PROB: f64 = 1e-9;

/// Ordered set of distinct symbol labels. Declaration order is the index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::named(symbols, "alphabet")
    }

    fn named<S: Into<String>>(
        symbols: impl IntoIterator<Item = S>,
        what: &'static str,
    ) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet(what));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Self { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn label(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(label.to_string()))
    }

    /// Parses a word. Comma-separated labels are accepted everywhere; when
    /// every label is a single character the commas may be dropped (`"0110"`).
    pub fn parse_word(&self, word: &str) -> Result<Vec<usize>> {
        let word = word.trim();
        if word.is_empty() {
            return Ok(Vec::new());
        }
        if word.contains(',') {
            return word.split(',').map(|s| self.index_of(s.trim())).collect();
        }
        if self.symbols.iter().all(|s| s.chars().count() == 1) {
            word.chars()
                .map(|c| self.index_of(c.encode_utf8(&mut [0; 4])))
                .collect()
        } else {
            Ok(vec![self.index_of(word)?])
        }
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        let single = self.symbols.iter().all(|s| s.chars().count() == 1);
        let labels = word.iter().map(|&i| self.label(i));
        if single {
            labels.collect()
        } else {
            labels.collect::<Vec<_>>().join(",")
        }
    }
}

/// One listed transition of the JSON exchange format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTransition {
    pub from: String,
    pub input: String,
    pub output: String,
    pub to: String,
    pub prob: f64,
}

/// Unvalidated spec as read from JSON. Omitted transitions have probability 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSpec {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub states: Vec<String>,
    pub transitions: Vec<RawTransition>,
}

impl RawSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A validated, jointly unifilar transducer presentation.
#[derive(Debug, Clone, PartialEq)]
pub struct TransducerSpec {
    inputs: Alphabet,
    outputs: Alphabet,
    states: Alphabet,
    // index: ((i * |X| + x) * |Y| + y) * n + j
    tensor: Vec<f64>,
}

impl TransducerSpec {
    /// Validates a dense tensor laid out as `tensor[i][x][y][j]` (row-major).
    pub fn from_tensor(
        inputs: Alphabet,
        outputs: Alphabet,
        states: Alphabet,
        tensor: Vec<f64>,
    ) -> Result<Self> {
        let expected = states.len() * inputs.len() * outputs.len() * states.len();
        if tensor.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: tensor.len(),
            });
        }
        let mut spec = Self {
            inputs,
            outputs,
            states,
            tensor,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&mut self) -> Result<()> {
        let n = self.n_states();
        for i in 0..n {
            for x in 0..self.n_inputs() {
                let mut sum = 0.0;
                for y in 0..self.n_outputs() {
                    let mut successors = 0;
                    for j in 0..n {
                        let at = self.offset(i, x, y, j);
                        let p = self.tensor[at];
                        if !p.is_finite() || p < -EPS_PROB {
                            return Err(Error::NegativeProbability {
                                from: self.states.label(i).into(),
                                input: self.inputs.label(x).into(),
                                output: self.outputs.label(y).into(),
                                to: self.states.label(j).into(),
                                prob: p,
                            });
                        }
                        if p < 0.0 {
                            self.tensor[at] = 0.0;
                        }
                        if p > EPS_PROB {
                            successors += 1;
                        }
                        sum += self.tensor[at];
                    }
                    if successors > 1 {
                        return Err(Error::NonUnifilar {
                            state: self.states.label(i).into(),
                            input: self.inputs.label(x).into(),
                            output: self.outputs.label(y).into(),
                        });
                    }
                }
                if (sum - 1.0).abs() > EPS_PROB {
                    return Err(Error::RowNotNormalized {
                        state: self.states.label(i).into(),
                        input: self.inputs.label(x).into(),
                        sum,
                    });
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn offset(&self, i: usize, x: usize, y: usize, j: usize) -> usize {
        ((i * self.inputs.len() + x) * self.outputs.len() + y) * self.states.len() + j
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    pub fn states(&self) -> &Alphabet {
        &self.states
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    /// `T[i][x][y][j]`.
    #[inline]
    pub fn prob(&self, i: usize, x: usize, y: usize, j: usize) -> f64 {
        self.tensor[self.offset(i, x, y, j)]
    }

    /// Probability of emitting `y` from `i` on input `x`, summed over successors.
    pub fn emission(&self, i: usize, x: usize, y: usize) -> f64 {
        (0..self.n_states()).map(|j| self.prob(i, x, y, j)).sum()
    }

    /// The unique successor of `(i, x, y)` together with its probability, if
    /// the emission is possible.
    pub fn successor(&self, i: usize, x: usize, y: usize) -> Option<(usize, f64)> {
        (0..self.n_states())
            .map(|j| (j, self.prob(i, x, y, j)))
            .find(|&(_, p)| p > EPS_PROB)
    }

    pub fn tensor(&self) -> &[f64] {
        &self.tensor
    }

    pub fn to_raw(&self) -> RawSpec {
        let mut transitions = Vec::new();
        for i in 0..self.n_states() {
            for x in 0..self.n_inputs() {
                for y in 0..self.n_outputs() {
                    for j in 0..self.n_states() {
                        let p = self.prob(i, x, y, j);
                        if p > 0.0 {
                            transitions.push(RawTransition {
                                from: self.states.label(i).into(),
                                input: self.inputs.label(x).into(),
                                output: self.outputs.label(y).into(),
                                to: self.states.label(j).into(),
                                prob: p,
                            });
                        }
                    }
                }
            }
        }
        RawSpec {
            inputs: self.inputs.symbols().to_vec(),
            outputs: self.outputs.symbols().to_vec(),
            states: self.states.symbols().to_vec(),
            transitions,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        validate_spec(&RawSpec::from_json(text)?)
    }

    /// Adds a copy of `state` named `<label>'`. The copy has the same rows as
    /// the original except that transitions into `state` (from the copy and
    /// from every other state) are redirected to the copy. The result presents
    /// the same process with one redundant state.
    pub fn with_duplicated_state(&self, state: usize) -> Result<Self> {
        let n = self.n_states();
        let mut labels: Vec<String> = self.states.symbols().to_vec();
        labels.push(format!("{}'", labels[state]));
        let states = Alphabet::named(labels, "states")?;
        let m = n + 1;
        let (nx, ny) = (self.n_inputs(), self.n_outputs());
        let mut tensor = vec![0.0; m * nx * ny * m];
        let at = |i: usize, x: usize, y: usize, j: usize| ((i * nx + x) * ny + y) * m + j;
        for i in 0..m {
            let src = if i == n { state } else { i };
            for x in 0..nx {
                for y in 0..ny {
                    for j in 0..n {
                        let p = self.prob(src, x, y, j);
                        let target = if j == state && i != state { n } else { j };
                        tensor[at(i, x, y, target)] += p;
                    }
                }
            }
        }
        Self::from_tensor(self.inputs.clone(), self.outputs.clone(), states, tensor)
    }
}

/// Builds a [`TransducerSpec`] from its JSON form, rejecting malformed or non-unifilar input.
pub fn validate_spec(raw: &RawSpec) -> Result<TransducerSpec> {
    let inputs = Alphabet::named(raw.inputs.iter().cloned(), "inputs")?;
    let outputs = Alphabet::named(raw.outputs.iter().cloned(), "outputs")?;
    let states = Alphabet::named(raw.states.iter().cloned(), "states")?;
    let (n, nx, ny) = (states.len(), inputs.len(), outputs.len());
    let mut tensor = vec![0.0; n * nx * ny * n];
    let mut seen = vec![false; tensor.len()];
    for t in &raw.transitions {
        let i = states.index_of(&t.from)?;
        let x = inputs.index_of(&t.input)?;
        let y = outputs.index_of(&t.output)?;
        let j = states.index_of(&t.to)?;
        let at = ((i * nx + x) * ny + y) * n + j;
        if std::mem::replace(&mut seen[at], true) {
            return Err(Error::DuplicateTransition {
                from: t.from.clone(),
                input: t.input.clone(),
                output: t.output.clone(),
                to: t.to.clone(),
            });
        }
        tensor[at] = t.prob;
    }
    TransducerSpec::from_tensor(inputs, outputs, states, tensor)
}

/// The successor state `g(i, x, y)`.
pub fn propagator(spec: &TransducerSpec, i: usize, x: usize, y: usize) -> Result<usize> {
    spec.successor(i, x, y)
        .map(|(j, _)| j)
        .ok_or_else(|| Error::ImpossibleEmission {
            state: spec.states().label(i).into(),
            input: spec.inputs().label(x).into(),
            output: spec.outputs().label(y).into(),
        })
}

/// A coin in a box, shaken with one of two strengths. Input `1` flips the
/// coin with probability `p`, input `0` with probability `q`; the output is
/// the new face, and the state (`s0` or `s1`) is the face last shown.
pub fn actively_perturbed_coin(p: f64, q: f64) -> Result<TransducerSpec> {
    for (name, value) in [("p", p), ("q", q)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ParameterOutOfRange { name, value });
        }
    }
    let mut tensor = vec![0.0; 2 * 2 * 2 * 2];
    let at = |i: usize, x: usize, y: usize, j: usize| ((i * 2 + x) * 2 + y) * 2 + j;
    for face in 0..2 {
        for (x, flip) in [(0, q), (1, p)] {
            tensor[at(face, x, face, face)] = 1.0 - flip;
            tensor[at(face, x, 1 - face, 1 - face)] = flip;
        }
    }
    TransducerSpec::from_tensor(
        Alphabet::new(["0", "1"])?,
        Alphabet::new(["0", "1"])?,
        Alphabet::new(["s0", "s1"])?,
        tensor,
    )
}

/// Two-state machine whose states emit disjoint outputs: `a` always emits
/// `0` and stays, `b` always emits `1` and stays, whatever the input.
pub fn disjoint_output_machine() -> TransducerSpec {
    let mut tensor = vec![0.0; 2 * 2 * 2 * 2];
    let at = |i: usize, x: usize, y: usize, j: usize| ((i * 2 + x) * 2 + y) * 2 + j;
    for x in 0..2 {
        tensor[at(0, x, 0, 0)] = 1.0;
        tensor[at(1, x, 1, 1)] = 1.0;
    }
    TransducerSpec::from_tensor(
        Alphabet::new(["0", "1"]).unwrap(),
        Alphabet::new(["0", "1"]).unwrap(),
        Alphabet::new(["a", "b"]).unwrap(),
        tensor,
    )
    .expect("disjoint-output machine is valid")
}

/// A memoryless machine that ignores its input and always emits `0`.
pub fn constant_machine() -> TransducerSpec {
    TransducerSpec::from_tensor(
        Alphabet::new(["0", "1"]).unwrap(),
        Alphabet::new(["0", "1"]).unwrap(),
        Alphabet::new(["a"]).unwrap(),
        vec![1.0, 0.0, 1.0, 0.0],
    )
    .expect("constant machine is valid")
}

/// IID input process: the same distribution over inputs at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(spec: &TransducerSpec, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != spec.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_inputs(),
                got: probs.len(),
            });
        }
        Self::from_probs(probs)
    }

    pub(crate) fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "negative or non-finite entry in {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > EPS_PROB {
            return Err(Error::InvalidDistribution(format!("sums to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(spec: &TransducerSpec) -> Self {
        let k = spec.n_inputs();
        Self {
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Parses `sym=prob,sym=prob`. Symbols that are not listed get probability 0.
    pub fn parse(spec: &TransducerSpec, text: &str) -> Result<Self> {
        let mut probs = vec![0.0; spec.n_inputs()];
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (sym, value) = part.split_once('=').ok_or_else(|| {
                Error::InvalidDistribution(format!("expected sym=prob, got `{part}`"))
            })?;
            let x = spec.inputs().index_of(sym.trim())?;
            probs[x] = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidDistribution(format!("bad probability `{value}`")))?;
        }
        Self::new(spec, probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: usize) -> f64 {
        self.probs[x]
    }

    pub fn labelled(&self, spec: &TransducerSpec) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .enumerate()
            .map(|(x, &p)| (spec.inputs().label(x).to_string(), p))
            .collect()
    }
}

/// A finite run: the initial state and the `(input, output)` pair of each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial_state: usize,
    pub steps: Vec<(usize, usize)>,
}

impl Trace {
    pub fn new(
        spec: &TransducerSpec,
        initial_state: usize,
        steps: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if initial_state >= spec.n_states() {
            return Err(Error::UnknownSymbol(format!("state #{initial_state}")));
        }
        for &(x, y) in &steps {
            if x >= spec.n_inputs() || y >= spec.n_outputs() {
                return Err(Error::UnknownSymbol(format!("step ({x}, {y})")));
            }
        }
        Ok(Self {
            initial_state,
            steps,
        })
    }

    pub fn inputs(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.0).collect()
    }

    pub fn outputs(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.1).collect()
    }
}

/// Shape of randomly generated unifilar transducers.
#[derive(Debug, Clone, Copy)]
pub struct RandomSpecConfig {
    pub max_states: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    /// Lower end of the raw weight range before normalization; keeps
    /// probabilities away from zero.
    pub min_weight: f64,
}

impl Default for RandomSpecConfig {
    fn default() -> Self {
        Self {
            max_states: 5,
            max_inputs: 3,
            max_outputs: 3,
            min_weight: 0.1,
        }
    }
}

/// Draws a random jointly unifilar transducer. Each `(i, x)` row emits a random
/// non-empty subset of outputs, each output leading to one uniformly chosen
/// successor. The result is valid but not necessarily minimal.
pub fn random_unifilar<R: Rng + ?Sized>(rng: &mut R, config: &RandomSpecConfig) -> TransducerSpec {
    let n = rng.gen_range(1..=config.max_states);
    let nx = rng.gen_range(1..=config.max_inputs);
    let ny = rng.gen_range(1..=config.max_outputs);
    let mut tensor = vec![0.0; n * nx * ny * n];
    let mut outputs: Vec<usize> = (0..ny).collect();
    for i in 0..n {
        for x in 0..nx {
            let support = rng.gen_range(1..=ny);
            outputs.shuffle(rng);
            let weights: Vec<f64> = (0..support)
                .map(|_| rng.gen_range(config.min_weight..=1.0))
                .collect();
            let total: f64 = weights.iter().sum();
            for (&y, w) in outputs[..support].iter().zip(&weights) {
                let j = rng.gen_range(0..n);
                tensor[((i * nx + x) * ny + y) * n + j] = w / total;
            }
        }
    }
    let labels = |prefix: &'static str, k: usize| (0..k).map(move |i| format!("{prefix}{i}"));
    TransducerSpec::from_tensor(
        Alphabet::new(labels("", nx)).unwrap(),
        Alphabet::new(labels("", ny)).unwrap(),
        Alphabet::new(labels("s", n)).unwrap(),
        tensor,
    )
    .expect("generated spec is valid")
}
