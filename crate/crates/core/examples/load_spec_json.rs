//! Loads a spec from JSON, reports validation errors and summarises valid machines.
//!
//! ```text
//! cargo run --example load_spec_json -- crates/core/examples/specs/two_step.json
//! ```

use iotrans::{
    classical_complexity, minimize, quantum_complexity, validate_spec, InputDistribution, RawSpec,
};

const BUNDLED: [(&str, &str); 4] = [
    ("coin.json", include_str!("specs/coin.json")),
    ("two_step.json", include_str!("specs/two_step.json")),
    ("disjoint.json", include_str!("specs/disjoint.json")),
    (
        "not_normalized.json",
        include_str!("specs/not_normalized.json"),
    ),
];

fn summarise(name: &str, text: &str) {
    let spec = match RawSpec::from_json(text).and_then(|raw| validate_spec(&raw)) {
        Ok(spec) => spec,
        Err(e) => {
            println!("{name}: rejected ({}): {e}", e.kind());
            return;
        }
    };
    let (minimal, _) = minimize(&spec).expect("valid specs minimize");
    let iid = InputDistribution::uniform(&minimal);
    print!(
        "{name}: {} states, {} causal",
        spec.n_states(),
        minimal.n_states()
    );
    match (
        classical_complexity(&minimal, &iid),
        quantum_complexity(&minimal, &iid),
    ) {
        (Ok(c), Ok(q)) => println!(", C_X = {c:.6}, Q_X = {q:.6} under uniform inputs"),
        (Err(e), _) | (_, Err(e)) => println!(", complexity undefined: {e}"),
    }
}

fn main() {
    let paths: Vec<String> = std::env::args().skip(1).collect();
    if paths.is_empty() {
        for (name, text) in BUNDLED {
            summarise(name, text);
        }
    }
    for path in paths {
        match std::fs::read_to_string(&path) {
            Ok(text) => summarise(&path, &text),
            Err(e) => println!("{path}: {e}"),
        }
    }
}
