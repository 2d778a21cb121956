//! The `iotrans` command line and the coin parameter sweep.
//!
//! Every subcommand prints JSON on standard output except `sweep`, which
//! prints CSV. Exit status is 0 on success, 1 on a domain error (invalid
//! spec, reducible chain, failed verification, ...) and 2 on a usage error.
//!
//! Analysis subcommands first minimize the given spec; state labels passed
//! on the command line may name any state of the original presentation and
//! are mapped to their causal state.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::circuit_sim::{build_realization, isometry_check, sample_output_frequencies};
use crate::classical_analysis::{
    discrimination_strategy, future_distribution, is_non_pathological, is_stepwise_inefficient,
    occupancy, trace_distance, InputPlan, StationaryOccupancy, StrategyStatus,
};
use crate::error::{Error, Result};
use crate::minimization::{minimize, Partition};
use crate::process_model::{
    actively_perturbed_coin, validate_spec, InputDistribution, RawSpec, TransducerSpec,
};
use crate::quantum_model::{
    gram_matrix, quantum_complexity_from, structural_complexity, Memory, DEFAULT_RESOLUTION,
};

#[derive(Debug, Parser)]
#[command(
    name = "iotrans",
    version,
    about = "Classical vs quantum memory of input-output processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a spec file describes a valid jointly unifilar transducer.
    Validate {
        file: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Merge equivalent states; prints the quotient spec and the partition.
    Minimize {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Classical complexity C_X under an IID input (`sym=prob,...`, default uniform).
    Complexity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        iid: Option<String>,
    },
    /// Quantum complexity Q_X under an IID input.
    Qcomplexity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        iid: Option<String>,
    },
    /// Supremum of C_X or Q_X over IID inputs.
    Structural {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "quantum")]
        which: Memory,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Report a step-wise inefficiency witness, if any.
    Inefficiency {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Adaptive input strategy telling two states apart.
    Discriminate {
        #[arg(long)]
        spec: PathBuf,
        /// Two state labels, comma separated.
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
    },
    /// Sample the quantum circuit on an input word.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        init: String,
        #[arg(long)]
        inputs: String,
        #[arg(long, env = "IOTRANS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Compare quantum and classical output distributions for every word.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        horizon: usize,
    },
    /// C̄ and Q̄ of the perturbed coin over a (p, q) grid, as CSV.
    Sweep {
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long, default_value_t = 0.01)]
        p_min: f64,
        #[arg(long, default_value_t = 0.49)]
        p_max: f64,
        #[arg(long, default_value_t = 0.01)]
        q_min: f64,
        #[arg(long, default_value_t = 0.49)]
        q_max: f64,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
}

/// Runs the command line; returns the process exit code.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let report = json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap());
            1
        }
    }
}

fn print(out: &mut dyn Write, value: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).unwrap())
        .map_err(|e| Error::Parse(e.to_string()))
}

fn read_raw(path: &Path) -> Result<RawSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    RawSpec::from_json(&text)
}

struct Loaded {
    original: TransducerSpec,
    minimal: TransducerSpec,
    partition: Partition,
}

impl Loaded {
    fn from_path(path: &Path) -> Result<Self> {
        let original = validate_spec(&read_raw(path)?)?;
        let (minimal, partition) = minimize(&original)?;
        Ok(Self {
            original,
            minimal,
            partition,
        })
    }

    /// Causal state of a state label from either presentation.
    fn state(&self, label: &str) -> Result<usize> {
        if let Ok(i) = self.minimal.states().index_of(label) {
            return Ok(i);
        }
        Ok(self
            .partition
            .class_of(self.original.states().index_of(label)?))
    }

    fn label(&self, i: usize) -> &str {
        self.minimal.states().label(i)
    }

    fn iid(&self, text: Option<&str>) -> Result<InputDistribution> {
        match text {
            Some(t) => InputDistribution::parse(&self.minimal, t),
            None => Ok(InputDistribution::uniform(&self.minimal)),
        }
    }
}

/// Zero-probability inputs and unvisited causal states.
fn input_warnings(
    spec: &TransducerSpec,
    dist: &InputDistribution,
    occ: &StationaryOccupancy,
) -> Vec<String> {
    let mut warnings = Vec::new();
    let unused: Vec<&str> = (0..spec.n_inputs())
        .filter(|&x| dist.prob(x) == 0.0)
        .map(|x| spec.inputs().label(x))
        .collect();
    if !unused.is_empty() {
        warnings.push(format!(
            "inputs {} never occur; the input process may be pathological",
            unused.join(",")
        ));
    }
    if !is_non_pathological(occ) {
        warnings.push("input is pathological: some causal state has zero occupancy".into());
    }
    warnings
}

fn occupancy_json(spec: &TransducerSpec, probs: &[f64]) -> Value {
    let map: serde_json::Map<String, Value> = probs
        .iter()
        .enumerate()
        .map(|(i, &p)| (spec.states().label(i).to_string(), json!(p)))
        .collect();
    Value::Object(map)
}

fn word_probs_json(
    spec: &TransducerSpec,
    probs: impl IntoIterator<Item = (Vec<usize>, f64)>,
) -> Value {
    Value::Object(
        probs
            .into_iter()
            .map(|(w, p)| (spec.outputs().format_word(&w), json!(p)))
            .collect(),
    )
}

fn run(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { file, spec } => {
            let path = file
                .or(spec)
                .ok_or_else(|| Error::Parse("no spec file given".into()))?;
            let spec = validate_spec(&read_raw(&path)?)?;
            print(
                out,
                &json!({
                    "valid": true,
                    "states": spec.n_states(),
                    "inputs": spec.n_inputs(),
                    "outputs": spec.n_outputs(),
                }),
            )?;
        }
        Command::Minimize { spec } => {
            let l = Loaded::from_path(&spec)?;
            let classes: Vec<Vec<&str>> = l
                .partition
                .classes()
                .iter()
                .map(|c| c.iter().map(|&s| l.original.states().label(s)).collect())
                .collect();
            print(
                out,
                &json!({
                    "spec": serde_json::to_value(l.minimal.to_raw()).unwrap(),
                    "partition": classes,
                    "original_states": l.original.n_states(),
                    "causal_states": l.minimal.n_states(),
                }),
            )?;
        }
        Command::Complexity { spec, iid } => {
            let l = Loaded::from_path(&spec)?;
            let dist = l.iid(iid.as_deref())?;
            let occ = occupancy(&l.minimal, &dist)?;
            let mut report = json!({
                "C_X": occ.entropy_bits(),
                "occupancy": occupancy_json(&l.minimal, occ.probs()),
                "non_pathological": is_non_pathological(&occ),
            });
            let warnings = input_warnings(&l.minimal, &dist, &occ);
            if !warnings.is_empty() {
                report["warnings"] = json!(warnings);
            }
            print(out, &report)?;
        }
        Command::Qcomplexity { spec, iid } => {
            let l = Loaded::from_path(&spec)?;
            let dist = l.iid(iid.as_deref())?;
            let occ = occupancy(&l.minimal, &dist)?;
            let g = gram_matrix(&l.minimal)?;
            let mut report = json!({
                "Q_X": quantum_complexity_from(&g, &occ)?,
                "C_X": occ.entropy_bits(),
                "occupancy": occupancy_json(&l.minimal, occ.probs()),
                "non_pathological": is_non_pathological(&occ),
            });
            let warnings = input_warnings(&l.minimal, &dist, &occ);
            if !warnings.is_empty() {
                report["warnings"] = json!(warnings);
            }
            print(out, &report)?;
        }
        Command::Structural {
            spec,
            which,
            resolution,
        } => {
            let l = Loaded::from_path(&spec)?;
            let s = structural_complexity(&l.minimal, which, resolution)?;
            print(
                out,
                &json!({
                    "which": which,
                    "resolution": resolution,
                    "value_bits": s.value_bits,
                    "argmax_distribution": s.argmax.labelled(&l.minimal),
                }),
            )?;
        }
        Command::Inefficiency { spec } => {
            let l = Loaded::from_path(&spec)?;
            let witness = is_stepwise_inefficient(&l.minimal);
            print(
                out,
                &json!({
                    "stepwise_inefficient": witness.is_some(),
                    "witness": witness.map(|(i, j)| vec![l.label(i), l.label(j)]),
                }),
            )?;
        }
        Command::Discriminate {
            spec,
            pair,
            max_depth,
        } => {
            let l = Loaded::from_path(&spec)?;
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("--pair expects two labels, got `{pair}`")))?;
            let (i, j) = (l.state(a.trim())?, l.state(b.trim())?);
            let result = discrimination_strategy(&l.minimal, i, j, max_depth);
            let tree: Vec<Value> = result
                .decision_tree
                .iter()
                .map(|(history, &x)| {
                    let steps: Vec<String> = history
                        .iter()
                        .map(|&(hx, hy)| {
                            format!(
                                "{}/{}",
                                l.minimal.inputs().label(hx),
                                l.minimal.outputs().label(hy)
                            )
                        })
                        .collect();
                    json!({ "history": steps, "input": l.minimal.inputs().label(x) })
                })
                .collect();
            let mut report = json!({
                "pair": [l.label(i), l.label(j)],
                "decision_tree": tree,
            });
            match result.status {
                StrategyStatus::Distinguished { depth } => {
                    let p = future_distribution(
                        &l.minimal,
                        i,
                        InputPlan::Tree(&result.decision_tree),
                        depth,
                    )?;
                    let q = future_distribution(
                        &l.minimal,
                        j,
                        InputPlan::Tree(&result.decision_tree),
                        depth,
                    )?;
                    report["status"] = json!("Distinguished");
                    report["depth"] = json!(depth);
                    report["trace_distance"] = json!(trace_distance(&p, &q)?);
                }
                StrategyStatus::ConditionIiFails { pair: (u, v) } => {
                    report["status"] = json!("ConditionIIFails");
                    report["failing_pair"] = json!([l.label(u), l.label(v)]);
                }
                StrategyStatus::DepthExhausted => {
                    report["status"] = json!("DepthExhausted");
                }
            }
            print(out, &report)?;
        }
        Command::Simulate {
            spec,
            init,
            inputs,
            seed,
            samples,
        } => {
            let l = Loaded::from_path(&spec)?;
            let initial = l.state(&init)?;
            let word = l.minimal.inputs().parse_word(&inputs)?;
            let real = build_realization(&l.minimal)?;
            let (first, _) = {
                let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
                real.sample(initial, &word, &mut rng)
            };
            let (counts, min_fidelity) =
                sample_output_frequencies(&real, initial, &word, seed, samples.max(1));
            let (exact, _) = real.enumerate(initial, &word)?;
            let n = samples.max(1) as f64;
            print(
                out,
                &json!({
                    "seed": seed,
                    "initial": l.label(initial),
                    "inputs": l.minimal.inputs().format_word(&word),
                    "samples": samples.max(1),
                    "first_output": l.minimal.outputs().format_word(&first),
                    "frequencies": word_probs_json(&l.minimal, counts.into_iter().map(|(w, c)| (w, c as f64 / n))),
                    "exact": word_probs_json(&l.minimal, exact.probs),
                    "min_fidelity": min_fidelity,
                }),
            )?;
        }
        Command::Verify { spec, horizon } => {
            let l = Loaded::from_path(&spec)?;
            let report = verify_report(&l.minimal, horizon)?;
            let passed = report.passed;
            print(out, &serde_json::to_value(report).unwrap())?;
            if !passed {
                return Ok(1);
            }
        }
        Command::Sweep {
            points,
            p_min,
            p_max,
            q_min,
            q_max,
            resolution,
        } => {
            let rows = run_sweep(&SweepConfig {
                points,
                p_range: (p_min, p_max),
                q_range: (q_min, q_max),
                resolution,
            })?;
            write_sweep_csv(&rows, out)?;
        }
    }
    Ok(0)
}

#[derive(Debug, Clone, Serialize)]
pub struct WordCheck {
    pub initial: String,
    pub inputs: String,
    pub trace_distance: f64,
    pub min_fidelity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub horizon: usize,
    pub words: Vec<WordCheck>,
    pub max_trace_distance: f64,
    pub min_fidelity: f64,
    pub kraus_completeness_defect: f64,
    pub decompression_isometry_defect: f64,
    pub passed: bool,
}

fn all_words(alphabet: usize, len: usize) -> Vec<Vec<usize>> {
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..alphabet).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    words
}

/// Quantum-vs-classical comparison for every initial state and every input
/// word of length `1..=horizon`.
pub fn verify_report(spec: &TransducerSpec, horizon: usize) -> Result<VerifyReport> {
    let real = build_realization(spec)?;
    let mut words = Vec::new();
    for len in 1..=horizon {
        for word in all_words(spec.n_inputs(), len) {
            for i in 0..spec.n_states() {
                let (qd, records) = real.enumerate(i, &word)?;
                let cd = future_distribution(spec, i, InputPlan::Word(&word), len)?;
                words.push(WordCheck {
                    initial: spec.states().label(i).to_string(),
                    inputs: spec.inputs().format_word(&word),
                    trace_distance: trace_distance(&qd, &cd)?,
                    min_fidelity: records.iter().map(|r| r.fidelity).fold(1.0, f64::min),
                });
            }
        }
    }
    let max_td = words.iter().map(|w| w.trace_distance).fold(0.0, f64::max);
    let min_f = words.iter().map(|w| w.min_fidelity).fold(1.0, f64::min);
    let kraus = real.kraus_completeness_defect();
    let iso = isometry_check(&real);
    Ok(VerifyReport {
        horizon,
        passed: max_td <= 1e-9 && min_f >= 1.0 - 1e-9 && kraus <= 1e-9 && iso <= 1e-9,
        words,
        max_trace_distance: max_td,
        min_fidelity: min_f,
        kraus_completeness_defect: kraus,
        decompression_isometry_defect: iso,
    })
}

/// One grid point of the coin sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub q: f64,
    pub c_bar: f64,
    pub q_bar: f64,
    /// `<s_0|s_1>` of the minimized coin (1 when it has a single state).
    pub overlap: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    /// Grid points per axis, endpoints included.
    pub points: usize,
    pub p_range: (f64, f64),
    pub q_range: (f64, f64),
    /// Simplex resolution for the structural suprema.
    pub resolution: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            points: 21,
            p_range: (0.01, 0.49),
            q_range: (0.01, 0.49),
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

fn axis(name: &'static str, (lo, hi): (f64, f64), points: usize) -> Result<Vec<f64>> {
    for value in [lo, hi] {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ParameterOutOfRange { name, value });
        }
    }
    Ok(match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect(),
    })
}

/// Structural complexities of the minimized coin at one parameter point.
pub fn sweep_point(p: f64, q: f64, resolution: usize) -> Result<SweepRow> {
    let (coin, _) = minimize(&actively_perturbed_coin(p, q)?)?;
    let c_bar = structural_complexity(&coin, Memory::Classical, resolution)?.value_bits;
    let q_bar = structural_complexity(&coin, Memory::Quantum, resolution)?.value_bits;
    let overlap = if coin.n_states() == 2 {
        gram_matrix(&coin)?.get(0, 1)
    } else {
        1.0
    };
    Ok(SweepRow {
        p,
        q,
        c_bar,
        q_bar,
        overlap,
    })
}

/// Rows sorted by `(p, q)`; grid points are evaluated in parallel.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let ps = axis("p", config.p_range, config.points)?;
    let qs = axis("q", config.q_range, config.points)?;
    let grid: Vec<(f64, f64)> = ps
        .iter()
        .flat_map(|&p| qs.iter().map(move |&q| (p, q)))
        .collect();
    grid.par_iter()
        .map(|&(p, q)| sweep_point(p, q, config.resolution))
        .collect()
}

/// `x` with 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_sweep_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["p", "q", "c_bar", "q_bar", "overlap"])
        .map_err(io)?;
    for r in rows {
        w.write_record([r.p, r.q, r.c_bar, r.q_bar, r.overlap].map(format_sig))
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.0), "1.00000000000");
        assert_eq!(format_sig(0.25), "0.250000000000");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(0.5435644431997896), "0.543564443200");
        assert_eq!(format_sig(0.00275), "0.00275000000000");
    }

    #[test]
    fn axis_endpoints() {
        let a = axis("p", (0.01, 0.49), 21).unwrap();
        assert_eq!(a.len(), 21);
        assert!((a[10] - 0.25).abs() < 1e-15);
        assert_eq!(a[20], 0.49);
        assert!(axis("p", (0.0, 0.5), 3).is_err());
    }

    #[test]
    fn word_enumeration() {
        assert_eq!(
            all_words(2, 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(all_words(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn sweep_rows() {
        let quarter = sweep_point(0.25, 0.25, 16).unwrap();
        assert!((quarter.c_bar - 1.0).abs() < 1e-12);
        assert!((quarter.q_bar - 0.543_564_443).abs() < 1e-6);
        assert!((quarter.overlap - 0.75).abs() < 1e-15);

        let near_half = sweep_point(0.5 - 1e-6, 0.5 - 1e-6, 16).unwrap();
        assert!(near_half.q_bar < 0.01);

        let (a, b) = (
            sweep_point(0.1, 0.35, 16).unwrap(),
            sweep_point(0.35, 0.1, 16).unwrap(),
        );
        assert_eq!((a.c_bar, a.q_bar, a.overlap), (b.c_bar, b.q_bar, b.overlap));
    }

    #[test]
    fn sweep_output_is_byte_identical() {
        let config = SweepConfig {
            points: 4,
            resolution: 8,
            ..SweepConfig::default()
        };
        let render = || {
            let mut buf = Vec::new();
            write_sweep_csv(&run_sweep(&config).unwrap(), &mut buf).unwrap();
            buf
        };
        let first = render();
        assert_eq!(first, render());
        let rows = run_sweep(&config).unwrap();
        assert!(rows.windows(2).all(|w| (w[0].p, w[0].q) < (w[1].p, w[1].q)));
    }
}
