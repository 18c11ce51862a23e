//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashSet;
use std::path::Path;
use std::time::{Duration, Instant};

use qswitch_cli::cli::{counters_output, run, EXIT_OK};
use qswitch_cli::report::strip_timing;
use qswitch_cli::sweep::{exhaustive_tally, sampled_tally, with_workers};
use qswitch_core::bounds::{
    dense_coding_demo, dense_coding_demo_with, proposition2_brute_force, proposition2_exhaustive,
    q_eps_bound, vc_shattering, verify_certificate, Proposition2Method,
};
use qswitch_core::counters::Protocol;
use qswitch_core::game::{enumerate_inputs, sample_input, SwitchPath};
use qswitch_core::operators::{apply_u, dense_matrix, DenseMatrix, StateVector};
use qswitch_core::switch::run_switch;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn deterministic_success() -> Outcome {
    let start = Instant::now();
    let mut pairs = Vec::new();
    for (n, expected) in [(1u32, 16u64), (2, 1024)] {
        let t = exhaustive_tally(n, SwitchPath::Full, 1e-12).map_err(err)?;
        ensure(
            t.pairs_tested == expected,
            format!("n={n}: {} pairs", t.pairs_tested),
        )?;
        ensure(t.failures == 0, format!("n={n}: {} failures", t.failures))?;
        ensure(
            t.max_probability_deviation <= 1e-12,
            format!("n={n}: deviation {}", t.max_probability_deviation),
        )?;
        pairs.push(t.pairs_tested);
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(5),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!("pairs {pairs:?} in {:.3}s", elapsed.as_secs_f64()))
}

fn fast_full_equivalence() -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    for n in 1..=2 {
        let t = exhaustive_tally(n, SwitchPath::Full, 1e-12).map_err(err)?;
        ensure(t.failures == 0, format!("n={n}: {} mismatches", t.failures))?;
        total += t.pairs_tested;
    }
    for n in 3..=8 {
        let t =
            sampled_tally(n, SwitchPath::Full, 100_000, 7 + u64::from(n), 1e-12).map_err(err)?;
        ensure(
            t.pairs_tested == 100_000,
            format!("n={n}: {} pairs", t.pairs_tested),
        )?;
        ensure(t.failures == 0, format!("n={n}: {} mismatches", t.failures))?;
        total += t.pairs_tested;
    }
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "{total} pairs, 0 mismatches in {:.3}s",
        elapsed.as_secs_f64()
    ))
}

fn input_cardinality() -> Outcome {
    let mut counts = Vec::new();
    for (n, expected) in [(1u32, 4usize), (2, 32), (3, 1024), (4, 524_288)] {
        let mut seen = HashSet::new();
        let mut count = 0;
        for u in enumerate_inputs(n).map_err(err)? {
            count += 1;
            seen.insert((u.x.bits(), u.f.to_hex()));
        }
        ensure(count == expected, format!("n={n}: {count} inputs"))?;
        ensure(seen.len() == expected, format!("n={n}: duplicates"))?;
        counts.push(count);
    }
    Ok(format!("{counts:?}"))
}

fn proposition2() -> Outcome {
    for n in 1..=2 {
        let out = proposition2_exhaustive(n).map_err(err)?;
        ensure(out.method == Proposition2Method::Exhaustive, "wrong method")?;
        ensure(out.passed(), format!("n={n}: counterexample"))?;
    }
    let out = proposition2_exhaustive(3).map_err(err)?;
    ensure(
        out.method == Proposition2Method::Constructive,
        "wrong method at n=3",
    )?;
    ensure(out.pairs_checked == 1024 * 1023 / 2, "pair count at n=3")?;
    ensure(out.passed(), "n=3: witness failed")?;
    // drop Bob's function: Alice inputs differing only in x become inseparable
    let mutated = proposition2_brute_force(2, |a, b| a.f.eval(b.x)).map_err(err)?;
    ensure(mutated.counterexample.is_some(), "mutated game passed")?;
    Ok(format!(
        "n=1,2 exhaustive, n=3 {} witnesses, control rejected",
        out.pairs_checked
    ))
}

fn shattering() -> Outcome {
    let mut sizes = Vec::new();
    for n in 1..=4u32 {
        let cert = vc_shattering(n).map_err(err)?;
        let expected = (1u64 << n) - 1;
        ensure(
            cert.verified_size == expected,
            format!("n={n}: size {}", cert.verified_size),
        )?;
        ensure(
            verify_certificate(&cert),
            format!("n={n}: re-verification failed"),
        )?;
        let mut row = q_eps_bound(n, 0.0).map_err(err)?;
        ensure(row.attach_shattering(&cert), "attach failed")?;
        ensure(row.vc_paper_bound == 1 << (n - 1), "formula size")?;
        sizes.push((cert.verified_size, row.vc_paper_bound));
    }
    Ok(format!("(verified, formula) = {sizes:?}"))
}

fn bound_table() -> Outcome {
    let r10 = q_eps_bound(10, 0.0).map_err(err)?;
    ensure(
        r10.q_eps_lower_bound == 256.0,
        format!("n=10: {}", r10.q_eps_lower_bound),
    )?;
    ensure(r10.switch_qubits == 10, "switch cost at n=10")?;
    let r2 = q_eps_bound(2, 0.0).map_err(err)?;
    ensure(
        r2.deterministic_causal_qubits == 2.5,
        format!("n=2: {}", r2.deterministic_causal_qubits),
    )?;
    for n in 1..=30 {
        let mut prev = f64::INFINITY;
        for k in 0..=50 {
            let q = q_eps_bound(n, f64::from(k) / 100.0)
                .map_err(err)?
                .q_eps_lower_bound;
            ensure(q < prev, format!("not decreasing at n={n} k={k}"))?;
            prev = q;
        }
        for k in 0..=50 {
            let eps = f64::from(k) / 100.0;
            let (a, b) = (
                q_eps_bound(n, eps).map_err(err)?,
                q_eps_bound(n + 1, eps).map_err(err)?,
            );
            ensure(
                b.q_eps_lower_bound == 2.0 * a.q_eps_lower_bound,
                "not doubling",
            )?;
        }
    }
    Ok("n=10: 256 vs 10; n=2: 2.5; monotone and doubling".into())
}

fn dense_coding() -> Outcome {
    let report = dense_coding_demo().map_err(err)?;
    ensure(report.trials.len() == 4, "trial count")?;
    for t in &report.trials {
        ensure(
            t.decoded == t.message,
            format!("message {} decoded {}", t.message, t.decoded),
        )?;
        ensure(
            (t.probability - 1.0).abs() <= 1e-12,
            format!("probability {}", t.probability),
        )?;
    }
    ensure(report.passed, "demo failed")?;
    ensure(
        !dense_coding_demo_with(false).map_err(err)?.passed,
        "control passed",
    )?;
    Ok("4/4 messages, control rejected".into())
}

fn counters() -> Outcome {
    let mut instances = 0;
    for n in 1..=8 {
        let out = counters_output(n, 2_000, 100 + u64::from(n)).map_err(err)?;
        ensure(out.discriminates, format!("n={n}: not discriminating"))?;
        for e in &out.counters {
            ensure(
                e.consistent,
                format!("n={n}: inconsistent {:?}", e.report.protocol),
            )?;
            let pair = (e.report.alice_counter, e.report.bob_counter);
            match e.report.protocol {
                Protocol::Switch | Protocol::OneWay => ensure(
                    pair == (1, 1),
                    format!("{:?} read {pair:?}", e.report.protocol),
                )?,
                Protocol::TwoWay => {
                    ensure(pair.0 == 2 || pair.1 == 2, format!("two-way read {pair:?}"))?
                }
            }
        }
        instances += out.instances;
    }
    Ok(format!("{instances} instances"))
}

fn add(a: &DenseMatrix, b: &DenseMatrix, sign: f64) -> DenseMatrix {
    let entries = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| x + y * sign)
        .collect();
    DenseMatrix::from_rows(a.dim(), entries).unwrap()
}

fn oracle_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_apply: f64 = 0.0;
    let mut worst_prob: f64 = 0.0;
    let cases = 12_000;
    for i in 0..cases {
        let n = 1 + (i % 3) as u32;
        let a = sample_input(n, &mut rng).map_err(err)?;
        let b = sample_input(n, &mut rng).map_err(err)?;
        let psi = StateVector::random(n, &mut rng).map_err(err)?;
        let (da, db) = (dense_matrix(&a), dense_matrix(&b));
        let structured = apply_u(&a, psi.clone()).map_err(err)?;
        worst_apply = worst_apply.max(structured.max_abs_diff(&da.mul_vec(&psi).map_err(err)?));

        let (ab, ba) = (da.mul(&db).map_err(err)?, db.mul(&da).map_err(err)?);
        let anti = add(&ab, &ba, 1.0).mul_vec(&psi).map_err(err)?.norm_sqr() / 4.0;
        let comm = add(&ab, &ba, -1.0).mul_vec(&psi).map_err(err)?.norm_sqr() / 4.0;
        let out = run_switch(&a, &b, &psi).map_err(err)?;
        worst_prob = worst_prob
            .max((out.p0 - anti).abs())
            .max((out.p1 - comm).abs());
    }
    ensure(
        worst_apply <= 1e-12,
        format!("operator deviation {worst_apply:e}"),
    )?;
    ensure(
        worst_prob <= 1e-10,
        format!("probability deviation {worst_prob:e}"),
    )?;
    Ok(format!(
        "{cases} cases, max |dU| {worst_apply:e}, max |dp| {worst_prob:e}"
    ))
}

fn run_to_json(args: &[&str], out: &Path) -> Result<serde_json::Value, String> {
    let mut full = vec!["qswitch"];
    full.extend_from_slice(args);
    let out_str = out.to_str().ok_or("bad path")?;
    full.extend_from_slice(&["--output", out_str]);
    let code = run(full);
    ensure(code == EXIT_OK, format!("{args:?} exited {code}"))?;
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).map_err(err)?).map_err(err)?;
    strip_timing(&mut v);
    Ok(v)
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let commands: [&[&str]; 5] = [
        &["verify", "--n", "6", "--samples", "20000", "--seed", "9"],
        &[
            "verify",
            "--n",
            "3",
            "--mode",
            "exhaustive",
            "--path",
            "fast",
        ],
        &["counters", "--n", "4", "--samples", "500", "--seed", "9"],
        &["bench", "--n", "5", "--samples", "2000", "--seed", "9"],
        &[
            "bounds",
            "--n-min",
            "1",
            "--n-max",
            "12",
            "--epsilon",
            "0.05",
        ],
    ];
    for (i, cmd) in commands.iter().enumerate() {
        let out = dir.path().join(format!("{i}.json"));
        let first = run_to_json(cmd, &out)?;
        let mut with_workers_cmd = vec!["--workers", "1"];
        with_workers_cmd.extend_from_slice(cmd);
        let second = run_to_json(&with_workers_cmd, &out)?;
        let mut first_cfg = first.clone();
        let mut second_cfg = second.clone();
        first_cfg.as_object_mut().map(|o| o.remove("config"));
        second_cfg.as_object_mut().map(|o| o.remove("config"));
        ensure(
            first_cfg == second_cfg,
            format!("{cmd:?}: reports differ across worker counts"),
        )?;
        let third = run_to_json(cmd, &out)?;
        ensure(first == third, format!("{cmd:?}: reports differ"))?;
    }
    Ok(format!(
        "{} commands identical modulo timing",
        commands.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "deterministic switch success (n=1,2, full path)",
            deterministic_success,
        ),
        ("fast/full path equivalence", fast_full_equivalence),
        ("input-set cardinality", input_cardinality),
        ("pairwise separation of Alice inputs", proposition2),
        ("VC shattering certificates", shattering),
        ("bound table", bound_table),
        ("dense coding", dense_coding),
        ("channel-use counters", counters),
        ("dense-matrix oracle suite", oracle_suite),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    with_workers(None, || {
        for (i, (name, check)) in criteria.iter().enumerate() {
            match check() {
                Ok(detail) => println!("PASS  {:>2}. {name}: {detail}", i + 1),
                Err(detail) => {
                    failed += 1;
                    println!("FAIL  {:>2}. {name}: {detail}", i + 1);
                }
            }
        }
    });
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
