//! Classical and quantum memory costs of finite-state input-output processes.
//!
//! An input-output process is presented as a jointly unifilar transducer
//! ([`TransducerSpec`]): at every step the machine in state `i` receives an
//! input `x`, emits an output `y` and moves to state `j` with probability
//! `T[i][x][y][j]`. This crate
//!
//! - validates and minimizes such presentations to their ε-transducer
//!   ([`minimization`]),
//! - computes the classical input-dependent complexity `C_X` and the
//!   step-wise inefficiency / pairwise discrimination analysis
//!   ([`classical_analysis`]),
//! - builds the quantum causal states, their compressed form and the quantum
//!   complexity `Q_X`, together with the structural suprema over IID inputs
//!   ([`quantum_model`]),
//! - realizes the quantum transducer as an explicit circuit and checks,
//!   branch by branch, that it is statistically identical to the classical
//!   machine ([`circuit_sim`]),
//! - wires everything into the `iotrans` command line ([`cli`]).
//!
//! ```
//! use iotrans::{actively_perturbed_coin, classical_complexity, quantum_complexity, InputDistribution};
//!
//! let coin = actively_perturbed_coin(0.25, 0.25).unwrap();
//! let iid = InputDistribution::new(&coin, vec![0.5, 0.5]).unwrap();
//! let c = classical_complexity(&coin, &iid).unwrap();
//! let q = quantum_complexity(&coin, &iid).unwrap();
//! assert!((c - 1.0).abs() < 1e-12);
//! assert!((q - 0.543_564_443).abs() < 1e-6);
//! ```

pub mod circuit_sim;
pub mod classical_analysis;
pub mod cli;
mod error;
mod linalg;
pub mod minimization;
pub mod process_model;
pub mod quantum_model;

pub use circuit_sim::{
    build_full_states, build_realization, exact_output_distribution_quantum,
    perturbed_coin_circuit, simulate_quantum, CircuitRealization, CoinDilation, FullCausalState,
    SimRun,
};
pub use classical_analysis::{
    classical_complexity, condition_ii_input, discrimination_strategy, future_distribution,
    induced_chain, is_non_pathological, is_stepwise_inefficient, occupancy,
    stationary_distribution, trace_distance, FutureDistribution, InputPlan, StationaryOccupancy,
    StrategyResult, StrategyStatus,
};
pub use error::{Error, Result};
pub use linalg::{entropy_bits, MAX_AMPLITUDES};
pub use minimization::{minimize, quotient, refine_partition, Partition};
pub use process_model::{
    actively_perturbed_coin, propagator, validate_spec, Alphabet, InputDistribution, RawSpec,
    RawTransition, Trace, TransducerSpec, EPS_PROB,
};
pub use quantum_model::{
    compressed_states, condition_i_orthogonal, density_matrix, gram_matrix, quantum_complexity,
    quantum_complexity_from, quantum_overlap, structural_complexity, CompressedStates,
    DensityMatrix, GramMatrix, Memory, StructuralComplexity,
};
