use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use catp_core::circuit::compute_metrics;
use catp_core::cost::{cost_report, reference_devices, render_text, DeviceTimes, StageTimes};
use catp_core::nam::{nam, NamConfig};
use catp_core::passes::{do_pipeline, PassConfig};
use catp_core::pipeline::{transpile, Binding, PipelineConfig, StageTimings};
use catp_core::qaoa::{
    build_ansatz, evaluate_counts, evaluate_distribution, grid_search, noise_sweep,
    write_landscape_csv, write_sweep_csv, GridAxis, PortfolioInstance, QaoaConfig,
};
use catp_core::sim::{
    counts_to_bitstrings, sample_counts, simulate, NoiseChannel, NoiseKind, Placement,
};
use catp_core::tapt::{tapt, RoutedCircuit, TaptConfig, TaptError};
use catp_core::topology::{load_calibration, load_calibration_series, load_coupling, CouplingMap};
use catp_core::{qasm, Circuit};

/// Calibration-aware transpiler for parameterized ansatz circuits.
#[derive(Parser)]
#[command(name = "catp", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the portfolio QAOA ansatz as QASM.
    Ansatz(AnsatzArgs),
    /// Place and route a symbolic circuit (run once per ansatz).
    Tapt(TaptArgs),
    /// Re-match a routed circuit onto the best-scoring equivalent qubits.
    Nam(NamArgs),
    /// Bind parameter sets and run the optimisation passes.
    Bind(BindArgs),
    /// Full flow: place and route, re-match per calibration snapshot, bind and optimise.
    Transpile(TranspileArgs),
    /// Simulate a bound circuit with an optional noise channel.
    Simulate(SimulateArgs),
    /// Noise-rate sweep of the QAOA ansatz at fixed angles.
    Sweep(SweepArgs),
    /// Depth-1 grid search over (gamma, beta).
    Gridsearch(GridArgs),
    /// Expected transpilation time of a run, staged versus per-circuit.
    Cost(CostArgs),
}

#[derive(Args)]
struct AnsatzArgs {
    /// Portfolio instance JSON [default: bundled five-asset instance]
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Output file [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TaptFlags {
    /// Symbolic input circuit (QASM)
    #[arg(long)]
    circuit: PathBuf,
    /// Coupling map JSON [default: bundled 27-qubit heavy-hex]
    #[arg(long)]
    coupling: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Retry with new seeds while the cx increase (percent) exceeds this bound
    #[arg(long)]
    cx_max_increase: Option<f64>,
    /// Seeds to try after the first when --cx-max-increase is set
    #[arg(long, default_value_t = 20)]
    max_retries: usize,
}

#[derive(Args)]
struct TaptArgs {
    #[command(flatten)]
    flags: TaptFlags,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NamArgs {
    /// Routed circuit with a `//@layout` directive
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    coupling: Option<PathBuf>,
    /// Calibration snapshot JSON
    #[arg(long)]
    calibration: PathBuf,
    #[arg(long, default_value_t = 15)]
    nam_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BindArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// JSON list of parameter maps, e.g. `[{"gamma_1": 0.3, "beta_1": 0.7}]`
    #[arg(long)]
    bindings: PathBuf,
    #[arg(long, default_value_t = 15)]
    do_repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TranspileArgs {
    #[command(flatten)]
    flags: TaptFlags,
    /// Directory of calibration snapshots, used in timestamp order
    #[arg(long)]
    calibration_dir: PathBuf,
    #[arg(long)]
    bindings: PathBuf,
    #[arg(long, default_value_t = 15)]
    nam_trials: usize,
    #[arg(long, default_value_t = 15)]
    do_repeats: usize,
    /// Relative score change that triggers a re-match
    #[arg(long, default_value_t = 0.01)]
    drift_delta: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct NoiseArgs {
    /// none, bit_flip, bit_phase_flip or depolarizing
    #[arg(long, default_value = "none")]
    noise: String,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// per-gate-acted-qubits, all-qubits-per-layer or two-qubit-gates-only
    #[arg(long, default_value = "per-gate-acted-qubits")]
    placement: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Bound circuit (QASM)
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = 10_000)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Score outcomes against this portfolio instance
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Output JSON [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    beta: f64,
    /// Comma-separated noise rates
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.001,0.002,0.005,0.01,0.02,0.05,0.1"
    )]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = 0.1)]
    gamma_step: f64,
    #[arg(long, default_value_t = 0.1)]
    beta_step: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CostArgs {
    /// timings.json from `transpile`; replaces the reference device table
    #[arg(long, requires = "mu_sf")]
    timings: Option<PathBuf>,
    /// Baseline seconds per circuit, used with --timings
    #[arg(long)]
    mu_sf: Option<f64>,
    /// Comma-separated ansatz counts
    #[arg(long, value_delimiter = ',', default_value = "5,100")]
    n_a: Vec<usize>,
    /// Calibration change period for the changing-calibration column
    #[arg(long, default_value_t = 5)]
    m: usize,
    /// Also write the rows as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error class with its exit code.
struct Failure {
    class: &'static str,
    code: u8,
    message: String,
}

impl Failure {
    fn new(class: &'static str, code: u8, e: impl std::fmt::Display) -> Self {
        Self {
            class,
            code,
            message: e.to_string(),
        }
    }
}

macro_rules! fail_as {
    ($class:literal, $code:literal) => {
        |e| Failure::new($class, $code, e)
    };
}

const IO: u8 = 3;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new("io", IO, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: impl AsRef<[u8]>) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::new("io", IO, format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| Failure::new("io", IO, format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(fail_as!("io", 3))?;
    s.push('\n');
    write(path, s)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    qasm::parse(&read(path)?)
        .map_err(|e| Failure::new("parse", 4, format!("{}: {e}", path.display())))
}

fn coupling(path: Option<&Path>) -> Result<CouplingMap, Failure> {
    match path {
        Some(p) => load_coupling(p).map_err(fail_as!("topology", 5)),
        None => Ok(CouplingMap::heavy_hex_27()),
    }
}

fn instance(path: Option<&Path>) -> Result<PortfolioInstance, Failure> {
    match path {
        Some(p) => PortfolioInstance::load(p).map_err(fail_as!("parse", 4)),
        None => Ok(PortfolioInstance::bundled()),
    }
}

fn bindings(path: &Path) -> Result<Vec<Binding>, Failure> {
    let list: Vec<HashMap<String, f64>> = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::new("parse", 4, format!("{}: {e}", path.display())))?;
    if list.is_empty() {
        return Err(Failure::new(
            "parse",
            4,
            format!("{}: no parameter sets", path.display()),
        ));
    }
    Ok(list)
}

fn channel(a: &NoiseArgs) -> Result<NoiseChannel, Failure> {
    let kind: NoiseKind = serde_json::from_value(serde_json::Value::String(a.noise.clone()))
        .map_err(|_| Failure::new("usage", 2, format!("unknown noise channel `{}`", a.noise)))?;
    let placement: Placement =
        serde_json::from_value(serde_json::Value::String(a.placement.clone())).map_err(|_| {
            Failure::new(
                "usage",
                2,
                format!("unknown noise placement `{}`", a.placement),
            )
        })?;
    Ok(NoiseChannel::new(kind, a.lambda)
        .map_err(fail_as!("usage", 2))?
        .with_placement(placement))
}

fn tapt_config(f: &TaptFlags) -> TaptConfig {
    TaptConfig {
        seed: f.seed,
        cx_max_increase: f.cx_max_increase,
        max_retries: f.max_retries,
        ..TaptConfig::default()
    }
}

fn tapt_failure(e: TaptError) -> Failure {
    match e {
        TaptError::CxBoundUnsatisfiable { .. } => Failure::new("cx-bound", 7, e),
        TaptError::Capacity { .. } | TaptError::Disconnected { .. } => {
            Failure::new("topology", 5, e)
        }
        TaptError::BadConfig(_) => Failure::new("usage", 2, e),
        _ => Failure::new("tapt", 6, e),
    }
}

fn cmd_ansatz(a: AnsatzArgs) -> Result<(), Failure> {
    if a.p == 0 {
        return Err(Failure::new("usage", 2, "depth p must be at least 1"));
    }
    let c = build_ansatz(&instance(a.instance.as_deref())?, a.p);
    emit(a.out.as_deref(), &qasm::serialize(&c))
}

fn cmd_tapt(a: TaptArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.flags.circuit)?;
    let map = coupling(a.flags.coupling.as_deref())?;
    let out = match tapt(&c, &map, &tapt_config(&a.flags)) {
        Ok(o) => o,
        Err(TaptError::CxBoundUnsatisfiable {
            bound,
            best_pct,
            best,
        }) => {
            // Keep the closest attempt for inspection, then report the failure.
            write(
                &a.out.join("pqc.qasm"),
                qasm::serialize(&best.routed.circuit),
            )?;
            write_json(&a.out.join("tapt_report.json"), &best.report)?;
            return Err(tapt_failure(TaptError::CxBoundUnsatisfiable {
                bound,
                best_pct,
                best,
            }));
        }
        Err(e) => return Err(tapt_failure(e)),
    };
    write(
        &a.out.join("pqc.qasm"),
        qasm::serialize(&out.routed.circuit),
    )?;
    write_json(&a.out.join("tapt_report.json"), &out.report)
}

fn cmd_nam(a: NamArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.circuit)?;
    let map = coupling(a.coupling.as_deref())?;
    let cal = load_calibration(&a.calibration, &map).map_err(fail_as!("topology", 5))?;
    let rc = RoutedCircuit::from_placed(c)
        .ok_or_else(|| Failure::new("nam", 8, "circuit has no `//@layout` directive"))?;
    let out = nam(
        &rc,
        &map,
        &cal,
        &NamConfig {
            trials: a.nam_trials,
            seed: a.seed,
        },
    )
    .map_err(fail_as!("nam", 8))?;
    write(
        &a.out.join("matched.qasm"),
        qasm::serialize(&out.routed.circuit),
    )?;
    write_json(&a.out.join("match.json"), &out.result)
}

#[derive(Serialize)]
struct BindRecord {
    binding: usize,
    file: String,
    metrics: catp_core::CircuitMetrics,
}

fn cmd_bind(a: BindArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.circuit)?;
    let cfg = PassConfig {
        repeats: a.do_repeats,
        seed: a.seed,
        ..PassConfig::default()
    };
    let mut records = Vec::new();
    for (j, b) in bindings(&a.bindings)?.iter().enumerate() {
        let fin = do_pipeline(&c, b, &cfg).map_err(fail_as!("passes", 9))?;
        let file = format!("final_{j}.qasm");
        write(&a.out.join(&file), qasm::serialize(&fin))?;
        let metrics = compute_metrics(&fin, Some(&c)).map_err(fail_as!("passes", 9))?;
        records.push(BindRecord {
            binding: j,
            file,
            metrics,
        });
    }
    write_json(&a.out.join("bind_metrics.json"), &records)
}

#[derive(Serialize)]
struct TranspileMetrics<'a> {
    input: catp_core::CircuitMetrics,
    tapt: &'a catp_core::tapt::TaptReport,
    snapshots: &'a [catp_core::pipeline::SnapshotRecord],
    matches: Vec<(usize, &'a catp_core::nam::MatchResult)>,
    bound: &'a [catp_core::pipeline::BoundRecord],
}

fn cmd_transpile(a: TranspileArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.flags.circuit)?;
    let map = coupling(a.flags.coupling.as_deref())?;
    let snaps =
        load_calibration_series(&a.calibration_dir, &map).map_err(fail_as!("topology", 5))?;
    if snaps.is_empty() {
        return Err(Failure::new(
            "topology",
            5,
            format!("no snapshots in {}", a.calibration_dir.display()),
        ));
    }
    let binds = bindings(&a.bindings)?;
    let cfg = PipelineConfig {
        tapt: tapt_config(&a.flags),
        nam: NamConfig {
            trials: a.nam_trials,
            seed: a.flags.seed,
        },
        passes: PassConfig {
            repeats: a.do_repeats,
            seed: a.flags.seed,
            ..PassConfig::default()
        },
        drift_delta: a.drift_delta,
    };
    let t = Instant::now();
    let out = transpile(&c, &map, &snaps, &binds, &cfg).map_err(|e| match e {
        catp_core::pipeline::PipelineError::Tapt(t) => tapt_failure(t),
        catp_core::pipeline::PipelineError::Nam(n) => Failure::new("nam", 8, n),
        catp_core::pipeline::PipelineError::Passes(p) => Failure::new("passes", 9, p),
        catp_core::pipeline::PipelineError::Topology(t) => Failure::new("topology", 5, t),
        other => Failure::new("usage", 2, other),
    })?;
    let total = t.elapsed().as_secs_f64();

    write(
        &a.out.join("pqc.qasm"),
        qasm::serialize(&out.tapt.routed.circuit),
    )?;
    for (i, (_, m)) in out.matches.iter().enumerate() {
        write(
            &a.out.join(format!("matched_{i}.qasm")),
            qasm::serialize(&m.routed.circuit),
        )?;
    }
    let last = &out
        .matches
        .last()
        .expect("pipeline matches at least once")
        .1;
    write(
        &a.out.join("matched.qasm"),
        qasm::serialize(&last.routed.circuit),
    )?;
    for (j, f) in out.finals.iter().enumerate() {
        write(&a.out.join(format!("final_{j}.qasm")), qasm::serialize(f))?;
    }
    write(&a.out.join("final.qasm"), qasm::serialize(&out.finals[0]))?;
    let metrics = TranspileMetrics {
        input: compute_metrics(&c, None).map_err(fail_as!("parse", 4))?,
        tapt: &out.tapt.report,
        snapshots: &out.snapshots,
        matches: out.matches.iter().map(|(k, m)| (*k, &m.result)).collect(),
        bound: &out.bound,
    };
    write_json(&a.out.join("metrics.json"), &metrics)?;

    #[derive(Serialize)]
    struct Timings<'a> {
        stages: &'a StageTimings,
        means: StageTimes,
        total: f64,
    }
    write_json(
        &a.out.join("timings.json"),
        &Timings {
            stages: &out.timings,
            means: out.timings.means(),
            total,
        },
    )
}

#[derive(Serialize)]
struct SimOutput {
    shots: usize,
    seed: u64,
    channel: NoiseChannel,
    counts: std::collections::BTreeMap<String, usize>,
    distribution: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<catp_core::qaoa::EvaluationResult>,
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let c = load_circuit(&a.circuit)?;
    let ch = channel(&a.noise)?;
    let r = simulate(&c, &ch).map_err(fail_as!("simulation", 10))?;
    let counts =
        sample_counts(&r.distribution, a.shots, a.seed).map_err(fail_as!("simulation", 10))?;
    let evaluation = match &a.instance {
        Some(p) => {
            let inst = instance(Some(p))?;
            let mut e = evaluate_counts(&inst, &counts).map_err(fail_as!("simulation", 10))?;
            e.counts.clear();
            Some(e)
        }
        None => None,
    };
    let out = SimOutput {
        shots: a.shots,
        seed: a.seed,
        channel: ch,
        counts: counts_to_bitstrings(&counts, c.num_clbits),
        distribution: r.distribution,
        evaluation,
    };
    let mut s = serde_json::to_string_pretty(&out).map_err(fail_as!("io", 3))?;
    s.push('\n');
    emit(a.out.as_deref(), &s)
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Failure> {
    let inst = instance(a.instance.as_deref())?;
    let kinds = [
        NoiseKind::BitFlip,
        NoiseKind::BitPhaseFlip,
        NoiseKind::Depolarizing,
    ];
    let rows = noise_sweep(
        &inst,
        &[a.gamma],
        &[a.beta],
        &kinds,
        &a.lambdas,
        a.shots,
        a.seed,
    )
    .map_err(fail_as!("simulation", 10))?;
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows).map_err(fail_as!("io", 3))?;
    emit(a.out.as_deref(), &String::from_utf8_lossy(&buf))
}

fn cmd_gridsearch(a: GridArgs) -> Result<(), Failure> {
    use std::f64::consts::PI;
    let inst = instance(a.instance.as_deref())?;
    let ch = channel(&a.noise)?;
    let cfg = QaoaConfig {
        gamma: GridAxis {
            start: 0.0,
            stop: 2.0 * PI,
            step: a.gamma_step,
        },
        beta: GridAxis {
            start: 0.0,
            stop: PI,
            step: a.beta_step,
        },
        ..QaoaConfig::default()
    };
    let r = grid_search(&inst, &cfg, &ch).map_err(fail_as!("simulation", 10))?;
    let mut buf = Vec::new();
    write_landscape_csv(&mut buf, &r.landscape).map_err(fail_as!("io", 3))?;
    write(&a.out.join("landscape.csv"), buf)?;
    let dist =
        catp_core::qaoa::ansatz_distribution(&build_ansatz(&inst, 1), &[r.gamma], &[r.beta], &ch)
            .map_err(fail_as!("simulation", 10))?;
    let eval = evaluate_distribution(&inst, &dist).map_err(fail_as!("simulation", 10))?;

    #[derive(Serialize)]
    struct Optimum {
        gamma: f64,
        beta: f64,
        energy: f64,
        approximation_ratio: f64,
        success_probability: f64,
        channel: NoiseChannel,
    }
    write_json(
        &a.out.join("gridsearch.json"),
        &Optimum {
            gamma: r.gamma,
            beta: r.beta,
            energy: r.energy,
            approximation_ratio: eval.approximation_ratio,
            success_probability: eval.success_probability,
            channel: ch,
        },
    )
}

fn cmd_cost(a: CostArgs) -> Result<(), Failure> {
    let devices = match (&a.timings, a.mu_sf) {
        (Some(p), Some(mu_sf)) => {
            let v: serde_json::Value =
                serde_json::from_str(&read(p)?).map_err(fail_as!("parse", 4))?;
            let stages: StageTimes =
                serde_json::from_value(v["means"].clone()).map_err(fail_as!("parse", 4))?;
            vec![DeviceTimes {
                device: "measured".into(),
                stages,
                mu_sf,
            }]
        }
        _ => reference_devices(),
    };
    let rows = cost_report(&devices, &a.n_a, a.m).map_err(fail_as!("cost", 11))?;
    print!("{}", render_text(&rows));
    match &a.out {
        Some(p) => write_json(p, &rows),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Ansatz(a) => cmd_ansatz(a),
        Cmd::Tapt(a) => cmd_tapt(a),
        Cmd::Nam(a) => cmd_nam(a),
        Cmd::Bind(a) => cmd_bind(a),
        Cmd::Transpile(a) => cmd_transpile(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Gridsearch(a) => cmd_gridsearch(a),
        Cmd::Cost(a) => cmd_cost(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let record =
                serde_json::json!({ "error": f.class, "code": f.code, "message": f.message });
            eprintln!("{record}");
            ExitCode::from(f.code)
        }
    }
}
