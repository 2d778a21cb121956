//! Classical and quantum memory of the actively perturbed coin.
//!
//! ```text
//! cargo run --example perturbed_coin -- 0.3 0.2
//! ```

use iotrans::{
    actively_perturbed_coin, classical_complexity, gram_matrix, quantum_complexity,
    InputDistribution,
};

fn main() -> iotrans::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("p and q must be numbers"))
        .collect();
    let (p, q) = match args[..] {
        [p, q] => (p, q),
        _ => (0.25, 0.25),
    };

    let coin = actively_perturbed_coin(p, q)?;
    let overlap = gram_matrix(&coin)?.get(0, 1);
    println!("coin(p={p}, q={q}): <s0|s1> = {overlap:.6}");

    println!("{:>8} {:>10} {:>10}", "P(x=1)", "C_X", "Q_X");
    for k in 1..10 {
        let u = k as f64 / 10.0;
        let iid = InputDistribution::new(&coin, vec![1.0 - u, u])?;
        let c = classical_complexity(&coin, &iid)?;
        let qx = quantum_complexity(&coin, &iid)?;
        println!("{u:>8.1} {c:>10.6} {qx:>10.6}");
    }
    Ok(())
}
