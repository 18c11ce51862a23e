//! Throughput of the closed-form switch against the state-vector switch.

use std::hint::black_box;
use std::time::Instant;

use qswitch_core::game::sample_input;
use qswitch_core::operators::{PlayerInput, StateVector};
use qswitch_core::switch::{run_switch, run_switch_fast};
use qswitch_core::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Truth-table memory budget for the input pool.
const POOL_BYTES: usize = 64 << 20;
const MAX_POOL: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchPath {
    Fast,
    Full,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathTiming {
    pub instances: u64,
    /// Number of pairs decoding to 1, for cross-checking the two paths.
    pub ones: u64,
    pub wall_time: f64,
    pub instances_per_second: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub n: u32,
    pub samples: u64,
    pub pool_size: usize,
    pub rng_seed: u64,
    pub fast: Option<PathTiming>,
    pub full: Option<PathTiming>,
    /// Fast-path throughput over full-path throughput.
    pub speedup: Option<f64>,
}

/// Number of distinct sampled inputs kept in memory; pairs are drawn from it.
pub fn pool_size(n: u32, samples: u64) -> usize {
    let table_bytes = ((1usize << n) / 8).max(8);
    (POOL_BYTES / table_bytes)
        .clamp(2, MAX_POOL)
        .min((2 * samples).max(2) as usize)
}

fn time_path<F>(pairs: &[(usize, usize)], pool: &[PlayerInput], mut run: F) -> Result<PathTiming>
where
    F: FnMut(&PlayerInput, &PlayerInput) -> Result<u8>,
{
    let start = Instant::now();
    let mut ones = 0u64;
    for &(a, b) in pairs {
        ones += u64::from(black_box(run(&pool[a], &pool[b])?));
    }
    let wall_time = start.elapsed().as_secs_f64();
    Ok(PathTiming {
        instances: pairs.len() as u64,
        ones,
        wall_time,
        instances_per_second: pairs.len() as f64 / wall_time.max(1e-9),
    })
}

pub fn run_bench(n: u32, samples: u64, path: BenchPath, seed: u64) -> Result<BenchReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = pool_size(n, samples);
    let pool = (0..size)
        .map(|_| sample_input(n, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..samples)
        .map(|_| (rng.gen_range(0..size), rng.gen_range(0..size)))
        .collect();

    let fast = match path {
        BenchPath::Fast | BenchPath::Both => Some(time_path(&pairs, &pool, |a, b| {
            Ok(run_switch_fast(a, b)?.decoded_bit)
        })?),
        BenchPath::Full => None,
    };
    let full = match path {
        BenchPath::Full | BenchPath::Both => {
            let psi = StateVector::zero_state(n)?;
            Some(time_path(&pairs, &pool, |a, b| {
                Ok(run_switch(a, b, &psi)?.decoded_bit)
            })?)
        }
        BenchPath::Fast => None,
    };
    let speedup = match (&fast, &full) {
        (Some(f), Some(s)) => Some(f.instances_per_second / s.instances_per_second),
        _ => None,
    };
    Ok(BenchReport {
        n,
        samples,
        pool_size: size,
        rng_seed: seed,
        fast,
        full,
        speedup,
    })
}
