//! Stationary occupancy, classical complexity, step-wise inefficiency and
//! pairwise discrimination of causal states.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::entropy_bits;
use crate::process_model::{InputDistribution, TransducerSpec, EPS_PROB};

/// Longest horizon for which output-word distributions are enumerated.
pub const HORIZON_CAP: usize = 12;

/// Stationary probability `p_X(i)` of each causal state.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryOccupancy {
    pi: Vec<f64>,
}

impl StationaryOccupancy {
    pub fn new(pi: Vec<f64>) -> Result<Self> {
        let sum: f64 = pi.iter().sum();
        if pi.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > EPS_PROB {
            return Err(Error::InvalidDistribution(format!("occupancy {pi:?}")));
        }
        Ok(Self { pi })
    }

    pub fn probs(&self) -> &[f64] {
        &self.pi
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(self.pi.iter().copied())
    }
}

/// State-to-state chain obtained by averaging over IID inputs and summing
/// over outputs: `M[i][j] = Σ_x P(x) Σ_y T[i][x][y][j]`.
pub fn induced_chain(spec: &TransducerSpec, dist: &InputDistribution) -> DMatrix<f64> {
    let n = spec.n_states();
    DMatrix::from_fn(n, n, |i, j| {
        (0..spec.n_inputs())
            .map(|x| {
                dist.prob(x)
                    * (0..spec.n_outputs())
                        .map(|y| spec.prob(i, x, y, j))
                        .sum::<f64>()
            })
            .sum()
    })
}

fn reaches_all(adj: &DMatrix<f64>, transpose: bool) -> bool {
    let n = adj.nrows();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            let w = if transpose { adj[(v, u)] } else { adj[(u, v)] };
            if w > EPS_PROB && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Unique stationary distribution of an irreducible row-stochastic matrix.
pub fn stationary_distribution(m: &DMatrix<f64>) -> Result<StationaryOccupancy> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    if !(reaches_all(m, false) && reaches_all(m, true)) {
        return Err(Error::ReducibleChain);
    }
    // π (M - I) = 0 with the last balance equation replaced by Σπ = 1
    let mut a = m.transpose() - DMatrix::identity(n, n);
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let pi = a.lu().solve(&b).ok_or(Error::ReducibleChain)?;
    let mut pi: Vec<f64> = pi.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    StationaryOccupancy::new(pi)
}

/// Stationary occupancy of the causal states under IID inputs.
pub fn occupancy(spec: &TransducerSpec, dist: &InputDistribution) -> Result<StationaryOccupancy> {
    stationary_distribution(&induced_chain(spec, dist))
}

/// Input-dependent statistical complexity `C_X` in bits.
pub fn classical_complexity(spec: &TransducerSpec, dist: &InputDistribution) -> Result<f64> {
    Ok(occupancy(spec, dist)?.entropy_bits())
}

/// Every causal state is visited with non-zero probability.
pub fn is_non_pathological(occ: &StationaryOccupancy) -> bool {
    occ.probs().iter().all(|&p| p > EPS_PROB)
}

/// Inputs under which `i` and `j` never share an (output, successor) pair.
pub fn separating_inputs(spec: &TransducerSpec, i: usize, j: usize) -> Vec<usize> {
    (0..spec.n_inputs())
        .filter(|&x| {
            (0..spec.n_outputs()).all(|y| {
                (0..spec.n_states())
                    .all(|k| spec.prob(i, x, y, k) <= EPS_PROB || spec.prob(j, x, y, k) <= EPS_PROB)
            })
        })
        .collect()
}

/// Some input after which `i` and `j` can be told apart with certainty from
/// the (output, next state) pair, i.e. `T[i][x][y][k] T[j][x][y][k] = 0` for
/// all `y`, `k`.
pub fn condition_ii_input(spec: &TransducerSpec, i: usize, j: usize) -> Option<usize> {
    separating_inputs(spec, i, j).into_iter().next()
}

/// A pair of causal states with no separating input, if any. Pairs are
/// scanned in lexicographic order.
pub fn is_stepwise_inefficient(spec: &TransducerSpec) -> Option<(usize, usize)> {
    let n = spec.n_states();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| condition_ii_input(spec, i, j).is_none())
}

/// Observed `(input, output)` history.
pub type History = Vec<(usize, usize)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyStatus {
    /// Every branch of the decision tree rules out one hypothesis within `depth` steps.
    Distinguished { depth: usize },
    /// A pair reachable from the start has no separating input.
    ConditionIiFails { pair: (usize, usize) },
    /// No tree of depth at most `max_depth` exists, and none of the reachable
    /// pairs fails the separation test.
    DepthExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyResult {
    pub pair: (usize, usize),
    pub status: StrategyStatus,
    /// Next input for every history at which both hypotheses are still alive.
    pub decision_tree: BTreeMap<History, usize>,
}

/// Outcomes of feeding `x` to both hypotheses: `None` when the output rules
/// one of them out, otherwise the pair of successors.
fn branch_pairs(
    spec: &TransducerSpec,
    (a, b): (usize, usize),
    x: usize,
) -> Vec<(usize, (usize, usize))> {
    (0..spec.n_outputs())
        .filter_map(
            |y| match (spec.successor(a, x, y), spec.successor(b, x, y)) {
                (Some((na, _)), Some((nb, _))) => Some((y, (na, nb))),
                _ => None,
            },
        )
        .collect()
}

/// Adaptive input strategy separating initial states `i` and `j`.
///
/// At each live pair of hypotheses the strategy feeds an input that gives the
/// two no common (output, successor); an output only one of them can produce
/// settles the question, any other output moves both hypotheses along `g`.
/// The returned tree has minimal depth among such strategies, with ties
/// broken towards the smallest input.
pub fn discrimination_strategy(
    spec: &TransducerSpec,
    i: usize,
    j: usize,
    max_depth: usize,
) -> StrategyResult {
    let n = spec.n_states();
    let idx = |(a, b): (usize, usize)| a * n + b;
    let sep: Vec<Vec<usize>> = (0..n * n)
        .map(|p| separating_inputs(spec, p / n, p % n))
        .collect();

    // depth[p] = minimal tree depth from pair p; min-max value iteration
    let mut depth = vec![usize::MAX; n * n];
    let mut choice = vec![usize::MAX; n * n];
    for _ in 0..=n * n {
        let mut changed = false;
        for p in 0..n * n {
            let pair = (p / n, p % n);
            if pair.0 == pair.1 {
                continue;
            }
            for &x in &sep[p] {
                let worst = branch_pairs(spec, pair, x)
                    .iter()
                    .map(|&(_, next)| depth[idx(next)])
                    .max()
                    .unwrap_or(0);
                let d = worst.saturating_add(1);
                if d < depth[p] {
                    depth[p] = d;
                    choice[p] = x;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let start = (i, j);
    let d = depth[idx(start)];
    if i != j && d <= max_depth {
        let mut tree = BTreeMap::new();
        let mut stack = vec![(start, Vec::new())];
        while let Some((pair, history)) = stack.pop() {
            let x = choice[idx(pair)];
            for (y, next) in branch_pairs(spec, pair, x) {
                let mut h: History = history.clone();
                h.push((x, y));
                stack.push((next, h));
            }
            tree.insert(history, x);
        }
        return StrategyResult {
            pair: start,
            status: StrategyStatus::Distinguished { depth: d },
            decision_tree: tree,
        };
    }

    // breadth-first over pairs reachable through separating inputs
    let mut seen = vec![false; n * n];
    let mut queue = VecDeque::from([start]);
    seen[idx(start)] = true;
    let mut status = StrategyStatus::DepthExhausted;
    while let Some(pair) = queue.pop_front() {
        if sep[idx(pair)].is_empty() {
            status = StrategyStatus::ConditionIiFails { pair };
            break;
        }
        for &x in &sep[idx(pair)] {
            for (_, next) in branch_pairs(spec, pair, x) {
                if !std::mem::replace(&mut seen[idx(next)], true) {
                    queue.push_back(next);
                }
            }
        }
    }
    StrategyResult {
        pair: start,
        status,
        decision_tree: BTreeMap::new(),
    }
}

/// How inputs are chosen while enumerating future outputs.
#[derive(Debug, Clone, Copy)]
pub enum InputPlan<'a> {
    /// A fixed input word.
    Word(&'a [usize]),
    /// An adaptive decision tree; histories absent from the tree use input 0.
    Tree(&'a BTreeMap<History, usize>),
}

impl InputPlan<'_> {
    pub(crate) fn input_at(&self, history: &[(usize, usize)]) -> usize {
        match self {
            InputPlan::Word(w) => w[history.len()],
            InputPlan::Tree(t) => t.get(history).copied().unwrap_or(0),
        }
    }

    pub(crate) fn check(&self, horizon: usize) -> Result<()> {
        if horizon > HORIZON_CAP {
            return Err(Error::HorizonTooLarge {
                horizon,
                cap: HORIZON_CAP,
            });
        }
        if let InputPlan::Word(w) = self {
            if w.len() < horizon {
                return Err(Error::WordTooShort {
                    len: w.len(),
                    horizon,
                });
            }
        }
        Ok(())
    }
}

/// Distribution over output words of a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct FutureDistribution {
    pub horizon: usize,
    pub n_outputs: usize,
    /// Output words with non-zero probability.
    pub probs: BTreeMap<Vec<usize>, f64>,
}

impl FutureDistribution {
    pub fn prob(&self, word: &[usize]) -> f64 {
        self.probs.get(word).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// Exact distribution of the next `horizon` outputs from state `i`.
pub fn future_distribution(
    spec: &TransducerSpec,
    i: usize,
    plan: InputPlan<'_>,
    horizon: usize,
) -> Result<FutureDistribution> {
    plan.check(horizon)?;
    let mut probs = BTreeMap::new();
    let mut stack: Vec<(usize, History, f64)> = vec![(i, Vec::new(), 1.0)];
    while let Some((state, history, weight)) = stack.pop() {
        if history.len() == horizon {
            let word = history.iter().map(|s| s.1).collect();
            *probs.entry(word).or_insert(0.0) += weight;
            continue;
        }
        let x = plan.input_at(&history);
        for y in 0..spec.n_outputs() {
            if let Some((next, p)) = spec.successor(state, x, y) {
                let mut h = history.clone();
                h.push((x, y));
                stack.push((next, h, weight * p));
            }
        }
    }
    Ok(FutureDistribution {
        horizon,
        n_outputs: spec.n_outputs(),
        probs,
    })
}

/// Half the L1 distance between two output-word distributions.
pub fn trace_distance(p: &FutureDistribution, q: &FutureDistribution) -> Result<f64> {
    if p.horizon != q.horizon || p.n_outputs != q.n_outputs {
        return Err(Error::HorizonMismatch(format!(
            "horizon {} over {} outputs vs horizon {} over {} outputs",
            p.horizon, p.n_outputs, q.horizon, q.n_outputs
        )));
    }
    let mut sum = 0.0;
    for (w, a) in &p.probs {
        sum += (a - q.prob(w)).abs();
    }
    for (w, b) in &q.probs {
        if !p.probs.contains_key(w) {
            sum += b.abs();
        }
    }
    Ok((0.5 * sum).min(1.0))
}
