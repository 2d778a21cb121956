use iotrans::circuit_sim::step_distribution;
use iotrans::{actively_perturbed_coin, build_realization, perturbed_coin_circuit};

/// Four-qubit dilation of the coin next to the general construction.
fn main() -> iotrans::Result<()> {
    let (p, q) = (0.3, 0.2);
    let dilation = perturbed_coin_circuit(p, q)?;
    let general = build_realization(&actively_perturbed_coin(p, q)?)?;

    let r: f64 = 16.0 * p * q * (1.0 - p) * (1.0 - q);
    println!(
        "<s'0|s'1> = {:.12}, sqrt(r) = {:.12}",
        dilation.overlap(),
        r.sqrt()
    );
    println!(
        "unitarity defect of U and V: {:.1e}",
        dilation.unitarity_defect()
    );

    for j in 0..2 {
        for x in 0..2 {
            let four = dilation.conditional(j, x);
            let full = step_distribution(&general, j, x);
            println!(
                "face {j}, input {x}: four-qubit {:.6?}  general {:.6?}",
                four, full
            );
        }
    }
    Ok(())
}
