//! Coarse version of the coin sweep, written as CSV to stdout.
//!
//! ```text
//! cargo run --release --example structural_sweep > sweep.csv
//! ```

use iotrans::cli::{run_sweep, write_sweep_csv, SweepConfig};

fn main() -> iotrans::Result<()> {
    let rows = run_sweep(&SweepConfig {
        points: 7,
        resolution: 16,
        ..SweepConfig::default()
    })?;
    write_sweep_csv(&rows, &mut std::io::stdout().lock())?;

    let diagonal: Vec<_> = rows.iter().filter(|r| r.p == r.q).collect();
    eprintln!("diagonal Q̄:");
    for r in diagonal {
        eprintln!("  p = q = {:.2}: {:.6} bits", r.p, r.q_bar);
    }
    Ok(())
}
