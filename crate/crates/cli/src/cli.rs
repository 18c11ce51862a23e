//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check is violated, 2 on a
//! usage, capacity or i/o error. A human-readable summary goes to stdout and
//! the machine-readable report to `--output`.

use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qswitch_core::bounds::{
    dense_coding_demo, dense_coding_demo_with, distinguishability_premise_check,
    proposition2_exhaustive, q_eps_bound, vc_shattering, BoundReport, DenseCodingReport,
    Proposition2Method, BOUND_TABLE_LIMIT, DISTINGUISHABILITY_LIMIT,
    PROPOSITION2_CONSTRUCTIVE_LIMIT, SHATTERING_LIMIT,
};
use qswitch_core::counters::{discriminates, run_with_counters, CounterReport, Protocol};
use qswitch_core::game::{sample_input, GameInstance, SweepMode, SwitchPath};
use qswitch_core::operators::MAX_ARITY;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bench::{run_bench, BenchPath, BenchReport};
use crate::report::{self, Envelope, ReportError};
use crate::sweep::{verify_switch_protocol, with_workers};
use crate::DEFAULT_SEED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qswitch",
    version,
    about = "Quantum-switch protocol sweeps, bound tables and benchmarks"
)]
pub struct Cli {
    /// Worker threads (default: $QSWITCH_WORKERS, then available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the switch protocol against EE_n.
    Verify(VerifyArgs),
    /// Print the lower-bound table and run the bound checks.
    Bounds(BoundsArgs),
    /// Compare channel-use counters across protocols.
    Counters(CountersArgs),
    /// Measure fast-path and full-path throughput.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchPathArg {
    Fast,
    Full,
    Both,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the machine-readable report here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Default: exhaustive for n <= 2, sampled otherwise.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Default: full for n <= 2, fast otherwise.
    #[arg(long, value_enum)]
    pub path: Option<PathArg>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1)]
    pub n_min: u32,
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CountersArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Default: both for n <= 16, fast otherwise.
    #[arg(long, value_enum)]
    pub path: Option<BenchPathArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Resolved settings of a run, echoed into every report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_min: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SweepMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub type CmdResult = Result<i32, UsageError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let workers = cli.workers;
    let result = with_workers(workers, move || match cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Counters(a) => cmd_counters(a),
        Command::Bench(a) => cmd_bench(a),
    });
    match result {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        eprintln!("no --seed given, using default seed {DEFAULT_SEED}");
        DEFAULT_SEED
    })
}

fn emit<R: Serialize>(
    config: RunConfig,
    report: &R,
    csv_rows: Option<Result<String, ReportError>>,
    path: Option<&Path>,
) -> Result<(), UsageError> {
    let Some(path) = path else {
        return Ok(());
    };
    let contents = match config.format {
        Format::Json => report::to_json(&Envelope::new(config, report))?,
        Format::Csv => {
            csv_rows.ok_or_else(|| UsageError("csv output not supported here".into()))??
        }
    };
    report::write_file(path, &contents)?;
    Ok(())
}

fn check_n(n: u32) -> Result<(), UsageError> {
    if n == 0 || n > MAX_ARITY {
        return Err(UsageError(format!(
            "n must lie in 1..={MAX_ARITY}, got {n}"
        )));
    }
    Ok(())
}

/// Flat CSV view of a sweep report.
#[derive(Serialize)]
struct SweepRow {
    n: u32,
    mode: SweepMode,
    path: SwitchPath,
    pairs_tested: u64,
    failures: u64,
    max_probability_deviation: f64,
    wall_time: f64,
    rng_seed: Option<u64>,
}

pub fn cmd_verify(args: VerifyArgs) -> CmdResult {
    check_n(args.n)?;
    if !(args.tolerance >= 0.0 && args.tolerance.is_finite()) {
        return Err(UsageError(format!("invalid tolerance {}", args.tolerance)));
    }
    let mode = match args.mode {
        Some(ModeArg::Exhaustive) => SweepMode::Exhaustive,
        Some(ModeArg::Sampled) => SweepMode::Sampled,
        None => SweepMode::default_for(args.n),
    };
    let path = match args.path {
        Some(PathArg::Fast) => SwitchPath::Fast,
        Some(PathArg::Full) => SwitchPath::Full,
        None => SwitchPath::default_for(args.n),
    };
    let seed = match mode {
        SweepMode::Sampled => Some(resolve_seed(args.seed)),
        SweepMode::Exhaustive => None,
    };
    let report = verify_switch_protocol(
        args.n,
        mode,
        path,
        args.samples,
        seed.unwrap_or(0),
        args.tolerance,
    )?;
    println!(
        "verify n={} {:?}/{:?}: {} pairs, {} failures, max deviation {:e}, {:.3} s",
        report.n,
        report.mode,
        report.path,
        report.pairs_tested,
        report.failures,
        report.max_probability_deviation,
        report.wall_time
    );
    if let Some(inst) = &report.first_failure {
        println!("first failure: {inst:?}");
    }
    let config = RunConfig {
        command: "verify".into(),
        n: Some(args.n),
        mode: Some(mode),
        path: Some(format!("{path:?}").to_lowercase()),
        samples: (mode == SweepMode::Sampled).then_some(args.samples),
        seed,
        tolerance: Some(args.tolerance),
        output_path: args.out.output.clone(),
        format: args.out.format,
        ..Default::default()
    };
    let row = SweepRow {
        n: report.n,
        mode: report.mode,
        path: report.path,
        pairs_tested: report.pairs_tested,
        failures: report.failures,
        max_probability_deviation: report.max_probability_deviation,
        wall_time: report.wall_time,
        rng_seed: report.rng_seed,
    };
    let csv = report::to_csv(&[row]);
    emit(config, &report, Some(csv), args.out.output.as_deref())?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proposition2Summary {
    pub n: u32,
    pub method: Proposition2Method,
    pub pairs_checked: u64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShatteringSummary {
    pub n: u32,
    pub verified_size: u64,
    /// The `2^(n-1)` size used in the bound formula.
    pub formula_size: u64,
    pub subsets: u64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinguishabilitySummary {
    pub n: u32,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsOutput {
    pub rows: Vec<BoundReport>,
    pub proposition2: Vec<Proposition2Summary>,
    pub shattering: Vec<ShatteringSummary>,
    pub distinguishability: Vec<DistinguishabilitySummary>,
    pub dense_coding: DenseCodingReport,
    pub dense_coding_control_rejected: bool,
    pub table_consistent: bool,
    pub all_passed: bool,
}

/// Runs the bound machinery for `n_min..=n_max` at error `epsilon`.
pub fn bounds_output(n_min: u32, n_max: u32, epsilon: f64) -> qswitch_core::Result<BoundsOutput> {
    let mut rows = Vec::new();
    let mut proposition2 = Vec::new();
    let mut shattering = Vec::new();
    let mut distinguishability = Vec::new();
    for n in n_min..=n_max {
        let mut row = q_eps_bound(n, epsilon)?;
        if n <= SHATTERING_LIMIT {
            let cert = vc_shattering(n)?;
            let attached = row.attach_shattering(&cert);
            shattering.push(ShatteringSummary {
                n,
                verified_size: cert.verified_size,
                formula_size: row.vc_paper_bound,
                subsets: cert.assignments.len() as u64,
                passed: attached && cert.verified_size == (1 << n) - 1,
            });
        }
        if n <= PROPOSITION2_CONSTRUCTIVE_LIMIT {
            let out = proposition2_exhaustive(n)?;
            proposition2.push(Proposition2Summary {
                n,
                method: out.method,
                pairs_checked: out.pairs_checked,
                passed: out.passed(),
            });
        }
        if n <= DISTINGUISHABILITY_LIMIT {
            distinguishability.push(DistinguishabilitySummary {
                n,
                passed: distinguishability_premise_check(n)?,
            });
        }
        rows.push(row);
    }
    let table_consistent = rows
        .iter()
        .all(|r| (0.0..=f64::from(r.n - 1).exp2() / 2.0).contains(&r.q_eps_lower_bound))
        && rows
            .windows(2)
            .all(|w| w[1].q_eps_lower_bound == 2.0 * w[0].q_eps_lower_bound);
    let dense_coding = dense_coding_demo()?;
    let dense_coding_control_rejected = !dense_coding_demo_with(false)?.passed;
    let all_passed = table_consistent
        && dense_coding.passed
        && dense_coding_control_rejected
        && proposition2.iter().all(|p| p.passed)
        && shattering.iter().all(|s| s.passed)
        && distinguishability.iter().all(|d| d.passed);
    Ok(BoundsOutput {
        rows,
        proposition2,
        shattering,
        distinguishability,
        dense_coding,
        dense_coding_control_rejected,
        table_consistent,
        all_passed,
    })
}

pub fn cmd_bounds(args: BoundsArgs) -> CmdResult {
    if args.n_min == 0 || args.n_min > args.n_max || args.n_max > BOUND_TABLE_LIMIT {
        return Err(UsageError(format!(
            "need 1 <= n-min <= n-max <= {BOUND_TABLE_LIMIT}, got {}..{}",
            args.n_min, args.n_max
        )));
    }
    let out = bounds_output(args.n_min, args.n_max, args.epsilon)?;

    println!("epsilon = {}", args.epsilon);
    println!(
        "{:>3} {:>14} {:>7} {:>10} {:>12} {:>9}",
        "n", "one-way bound", "switch", "ratio", "zero-error", "VC (S)"
    );
    for r in &out.rows {
        let vc = r.vc_verified.map_or("-".to_string(), |v| v.to_string());
        println!(
            "{:>3} {:>14} {:>7} {:>10.4} {:>12} {:>9}",
            r.n,
            r.q_eps_lower_bound,
            r.switch_qubits,
            r.separation_ratio,
            r.deterministic_causal_qubits,
            vc
        );
    }
    for p in &out.proposition2 {
        println!(
            "separation n={} ({:?}, {} pairs): {}",
            p.n,
            p.method,
            p.pairs_checked,
            pass(p.passed)
        );
    }
    for s in &out.shattering {
        println!(
            "shattering n={} size {} ({} subsets): {}",
            s.n,
            s.verified_size,
            s.subsets,
            pass(s.passed)
        );
    }
    for d in &out.distinguishability {
        println!("distinct rows n={}: {}", d.n, pass(d.passed));
    }
    println!(
        "dense coding: {} (control rejected: {})",
        pass(out.dense_coding.passed),
        out.dense_coding_control_rejected
    );

    let config = RunConfig {
        command: "bounds".into(),
        n_min: Some(args.n_min),
        n_max: Some(args.n_max),
        epsilon: Some(args.epsilon),
        output_path: args.out.output.clone(),
        format: args.out.format,
        ..Default::default()
    };
    let csv = report::bound_rows_csv(&out.rows);
    emit(config, &out, Some(csv), args.out.output.as_deref())?;
    Ok(if out.all_passed {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterEntry {
    #[serde(flatten)]
    pub report: CounterReport,
    /// Every instance produced this same reading.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountersOutput {
    pub instances: u64,
    pub counters: Vec<CounterEntry>,
    pub discriminates: bool,
}

pub fn counters_output(n: u32, samples: u64, seed: u64) -> qswitch_core::Result<CountersOutput> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<Option<CounterEntry>> = vec![None; Protocol::ALL.len()];
    let mut ok = true;
    for _ in 0..samples.max(1) {
        let inst = GameInstance::new(sample_input(n, &mut rng)?, sample_input(n, &mut rng)?)?;
        let reports = Protocol::ALL
            .iter()
            .map(|&p| run_with_counters(p, &inst))
            .collect::<qswitch_core::Result<Vec<_>>>()?;
        ok &= discriminates(&reports);
        for (slot, r) in entries.iter_mut().zip(reports) {
            match slot {
                None => {
                    *slot = Some(CounterEntry {
                        report: r,
                        consistent: true,
                    })
                }
                Some(e) => e.consistent &= e.report == r,
            }
        }
    }
    Ok(CountersOutput {
        instances: samples.max(1),
        counters: entries.into_iter().flatten().collect(),
        discriminates: ok,
    })
}

pub fn cmd_counters(args: CountersArgs) -> CmdResult {
    check_n(args.n)?;
    let seed = resolve_seed(args.seed);
    let out = counters_output(args.n, args.samples, seed)?;
    for e in &out.counters {
        println!(
            "{:?}: alice {} bob {} (<N> = {}, {})",
            e.report.protocol,
            e.report.alice_counter,
            e.report.bob_counter,
            e.report.expectation_n_alice,
            e.report.expectation_n_bob
        );
    }
    println!(
        "{} instances, discriminates: {}",
        out.instances, out.discriminates
    );
    let config = RunConfig {
        command: "counters".into(),
        n: Some(args.n),
        samples: Some(args.samples),
        seed: Some(seed),
        output_path: args.out.output.clone(),
        format: args.out.format,
        ..Default::default()
    };
    let rows: Vec<_> = out.counters.iter().map(|e| e.report).collect();
    let csv = report::to_csv(&rows);
    emit(config, &out, Some(csv), args.out.output.as_deref())?;
    Ok(if out.discriminates {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

pub fn cmd_bench(args: BenchArgs) -> CmdResult {
    check_n(args.n)?;
    let path = match args.path {
        Some(BenchPathArg::Fast) => BenchPath::Fast,
        Some(BenchPathArg::Full) => BenchPath::Full,
        Some(BenchPathArg::Both) => BenchPath::Both,
        None if args.n <= 16 => BenchPath::Both,
        None => BenchPath::Fast,
    };
    if path != BenchPath::Fast && args.n >= MAX_ARITY {
        return Err(UsageError(format!(
            "full path needs n < {MAX_ARITY} (control qubit included)"
        )));
    }
    let seed = resolve_seed(args.seed);
    let report: BenchReport = run_bench(args.n, args.samples, path, seed)?;
    for (name, t) in [("fast", &report.fast), ("full", &report.full)] {
        if let Some(t) = t {
            println!(
                "{name}: {} instances in {:.3} s ({:.0} instances/s)",
                t.instances, t.wall_time, t.instances_per_second
            );
        }
    }
    if let Some(s) = report.speedup {
        println!("speedup: {s:.1}x");
    }
    let config = RunConfig {
        command: "bench".into(),
        n: Some(args.n),
        path: Some(format!("{path:?}").to_lowercase()),
        samples: Some(args.samples),
        seed: Some(seed),
        output_path: args.out.output.clone(),
        format: args.out.format,
        ..Default::default()
    };
    emit(config, &report, None, args.out.output.as_deref())?;
    Ok(EXIT_OK)
}
