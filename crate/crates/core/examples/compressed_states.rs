//! Gram matrix, compressed quantum states and the memory density matrix.

use iotrans::{
    actively_perturbed_coin, compressed_states, density_matrix, gram_matrix, occupancy,
    InputDistribution,
};

fn main() -> iotrans::Result<()> {
    let coin = actively_perturbed_coin(0.25, 0.25)?;
    let g = gram_matrix(&coin)?;
    println!("Gram matrix (rank {}):{}", g.rank(), g.entries());

    let tau = compressed_states(&g);
    for i in 0..tau.len() {
        let v: Vec<String> = tau
            .vector(i)
            .iter()
            .map(|z| format!("{:.4}", z.re))
            .collect();
        println!("tau_{i} = ({})", v.join(", "));
    }

    let occ = occupancy(&coin, &InputDistribution::uniform(&coin))?;
    let rho = density_matrix(&g, &occ)?;
    println!("spectrum of rho: {:?}", rho.eigenvalues());
    println!(
        "Q_X = {:.9} bits, C_X = {:.9} bits",
        rho.entropy_bits(),
        occ.entropy_bits()
    );
    Ok(())
}
