//! Step-wise inefficiency and adaptive discrimination of state pairs.
//!
//! The coin's two states share an (output, successor) pair under every input,
//! so no strategy tells them apart with certainty. The three-state machine in
//! `specs/two_step.json` needs two steps: input `0` leaves `a` and `b` with the
//! same output but different successors, and a second `0` separates those.

use iotrans::process_model::disjoint_output_machine;
use iotrans::{
    actively_perturbed_coin, discrimination_strategy, is_stepwise_inefficient, validate_spec,
    RawSpec, StrategyStatus, TransducerSpec,
};

fn report(name: &str, spec: &TransducerSpec, i: usize, j: usize) {
    let label = |k| spec.states().label(k);
    match is_stepwise_inefficient(spec) {
        Some((a, b)) => println!(
            "{name}: step-wise inefficient, witness ({}, {})",
            label(a),
            label(b)
        ),
        None => println!("{name}: quantum causal states are orthogonal"),
    }
    let result = discrimination_strategy(spec, i, j, 8);
    match result.status {
        StrategyStatus::Distinguished { depth } => {
            println!(
                "  {} vs {}: distinguished in {depth} step(s)",
                label(i),
                label(j)
            );
            for (history, x) in &result.decision_tree {
                println!(
                    "    after {history:?} feed input {}",
                    spec.inputs().label(*x)
                );
            }
        }
        StrategyStatus::ConditionIiFails { pair: (a, b) } => println!(
            "  {} vs {}: no separating input for reachable pair ({}, {})",
            label(i),
            label(j),
            label(a),
            label(b)
        ),
        StrategyStatus::DepthExhausted => {
            println!("  {} vs {}: depth limit reached", label(i), label(j))
        }
    }
}

fn main() -> iotrans::Result<()> {
    report("coin", &actively_perturbed_coin(0.3, 0.2)?, 0, 1);
    report("disjoint", &disjoint_output_machine(), 0, 1);

    let raw = RawSpec::from_json(include_str!("specs/two_step.json"))?;
    report("two-step", &validate_spec(&raw)?, 0, 1);
    Ok(())
}
