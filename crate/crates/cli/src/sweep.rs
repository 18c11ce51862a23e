//! Data-parallel protocol sweeps.
//!
//! Sampled sweeps are split into fixed-size chunks; chunk `i` draws from the
//! ChaCha stream `i` of the base seed, so results do not depend on how many
//! worker threads run them.

use std::time::Instant;

use qswitch_core::game::{
    check_pair, check_sweep_request, enumerate_inputs, sample_input, GameInstance, SweepMode,
    SweepTally, SwitchPath,
};
use qswitch_core::operators::{input_count_log2, PlayerInput};
use qswitch_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Pairs drawn per RNG stream in a sampled sweep.
pub const SAMPLE_CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub n: u32,
    pub mode: SweepMode,
    pub path: SwitchPath,
    pub pairs_tested: u64,
    pub failures: u64,
    pub max_probability_deviation: f64,
    pub wall_time: f64,
    pub rng_seed: Option<u64>,
    pub first_failure: Option<GameInstance>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// RNG for chunk `index` of a sampled sweep with base seed `seed`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn tally_one(
    alice: PlayerInput,
    bob: PlayerInput,
    path: SwitchPath,
    tol: f64,
) -> Result<SweepTally> {
    let (ok, deviation) = check_pair(&alice, &bob, path, tol)?;
    Ok(SweepTally {
        pairs_tested: 1,
        failures: u64::from(!ok),
        max_probability_deviation: deviation,
        first_failure: (!ok).then_some(GameInstance { alice, bob }),
    })
}

fn merge(a: Result<SweepTally>, b: Result<SweepTally>) -> Result<SweepTally> {
    Ok(a?.merge(b?))
}

/// Exhaustive sweep over all ordered pairs.
pub fn exhaustive_tally(n: u32, path: SwitchPath, tolerance: f64) -> Result<SweepTally> {
    let inputs: Vec<PlayerInput> = enumerate_inputs(n)?.collect();
    inputs
        .par_iter()
        .map(|alice| {
            inputs.iter().try_fold(SweepTally::default(), |acc, bob| {
                Ok(acc.merge(tally_one(alice.clone(), bob.clone(), path, tolerance)?))
            })
        })
        .reduce(|| Ok(SweepTally::default()), merge)
}

fn chunk_pairs(
    n: u32,
    samples: u64,
    seed: u64,
    chunk: u64,
) -> impl Iterator<Item = Result<(PlayerInput, PlayerInput)>> {
    let len = SAMPLE_CHUNK.min(samples - chunk * SAMPLE_CHUNK);
    let mut rng = chunk_rng(seed, chunk);
    (0..len).map(move |_| Ok((sample_input(n, &mut rng)?, sample_input(n, &mut rng)?)))
}

/// The pairs a sampled sweep checks, in order.
pub fn sampled_pairs(n: u32, samples: u64, seed: u64) -> Result<Vec<(PlayerInput, PlayerInput)>> {
    (0..samples.div_ceil(SAMPLE_CHUNK))
        .flat_map(|c| chunk_pairs(n, samples, seed, c))
        .collect()
}

pub fn sampled_tally(
    n: u32,
    path: SwitchPath,
    samples: u64,
    seed: u64,
    tolerance: f64,
) -> Result<SweepTally> {
    (0..samples.div_ceil(SAMPLE_CHUNK))
        .into_par_iter()
        .map(|c| {
            chunk_pairs(n, samples, seed, c).try_fold(SweepTally::default(), |acc, pair| {
                let (alice, bob) = pair?;
                Ok(acc.merge(tally_one(alice, bob, path, tolerance)?))
            })
        })
        .reduce(|| Ok(SweepTally::default()), merge)
}

/// Checks the switch protocol against `EE_n` over all pairs or a seeded sample.
pub fn verify_switch_protocol(
    n: u32,
    mode: SweepMode,
    path: SwitchPath,
    samples: u64,
    seed: u64,
    tolerance: f64,
) -> Result<SweepReport> {
    check_sweep_request(n, mode, path)?;
    let start = Instant::now();
    let (tally, rng_seed) = match mode {
        SweepMode::Exhaustive => (exhaustive_tally(n, path, tolerance)?, None),
        SweepMode::Sampled => (
            sampled_tally(n, path, samples, seed, tolerance)?,
            Some(seed),
        ),
    };
    Ok(SweepReport {
        n,
        mode,
        path,
        pairs_tested: tally.pairs_tested,
        failures: tally.failures,
        max_probability_deviation: tally.max_probability_deviation,
        wall_time: start.elapsed().as_secs_f64(),
        rng_seed,
        first_failure: tally.first_failure,
    })
}

/// `|U_n|^2`, the number of ordered pairs in an exhaustive sweep.
pub fn exhaustive_pair_count(n: u32) -> u64 {
    1u64 << (2 * input_count_log2(n))
}

/// Runs `f` on a pool with the requested worker count, falling back to
/// `QSWITCH_WORKERS` and then to the available parallelism.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let workers = workers.or_else(|| {
        std::env::var(crate::WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    });
    match workers {
        Some(w) if w > 0 => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}
