//! A redundant presentation collapses back to its causal states.

use iotrans::{actively_perturbed_coin, minimize};

fn main() -> iotrans::Result<()> {
    let coin = actively_perturbed_coin(0.3, 0.2)?;
    let redundant = coin.with_duplicated_state(0)?;
    println!("redundant presentation: {:?}", redundant.states().symbols());

    let (minimal, partition) = minimize(&redundant)?;
    for class in partition.classes() {
        let members: Vec<&str> = class.iter().map(|&s| redundant.states().label(s)).collect();
        println!("causal state {{{}}}", members.join(", "));
    }
    println!("{}", minimal.to_json());

    // p = q = 1/2: every past predicts the same future
    let (fair, _) = minimize(&actively_perturbed_coin(0.5, 0.5)?)?;
    println!("fair coin keeps {} causal state", fair.n_states());
    Ok(())
}
