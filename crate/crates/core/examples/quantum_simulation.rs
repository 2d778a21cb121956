//! Runs the quantum transducer circuit and compares it with the classical machine.

use iotrans::{
    actively_perturbed_coin, build_realization, future_distribution, simulate_quantum,
    trace_distance, InputPlan,
};

fn main() -> iotrans::Result<()> {
    let coin = actively_perturbed_coin(0.3, 0.2)?;
    let real = build_realization(&coin)?;
    println!(
        "memory space dim {}, compressed dim {}, Kraus defect {:.1e}",
        real.memory_dim(),
        real.compressed().dim(),
        real.kraus_completeness_defect()
    );

    let word = coin.inputs().parse_word("1011")?;
    let (quantum, steps) = real.enumerate(0, &word)?;
    let classical = future_distribution(&coin, 0, InputPlan::Word(&word), word.len())?;
    println!(
        "inputs 1011 from s0: trace distance {:.2e}, worst step fidelity {:.12}",
        trace_distance(&quantum, &classical)?,
        steps.iter().map(|s| s.fidelity).fold(1.0, f64::min)
    );
    for (w, p) in &quantum.probs {
        println!("  P({}) = {p:.6}", coin.outputs().format_word(w));
    }

    let run = simulate_quantum(&coin, 0, &word, 2024)?;
    println!(
        "one seeded run: outputs {}",
        coin.outputs().format_word(&run.outputs)
    );
    Ok(())
}
