//! Checks behind the causally-ordered lower bounds on `EE_n`.
//!
//! * Row distinctness: every pair of distinct Alice inputs is separated by
//!   some Bob input, checked by brute force and by the explicit witness
//!   construction ([`construct_witness`]).
//! * The dimension count `d = ceil(sqrt(|X|))` for zero-error one-way
//!   transmission with shared entanglement, and a dense-coding simulation
//!   showing the `d^2` side of it.
//! * A shattered column set of size `2^n - 1`, with a certificate that is
//!   re-checked through [`ee_value`] alone.
//! * The bounded-error table `(1 - H(eps)) 2^(n-2)` against the `n` qubits
//!   used by the switch.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{check_arity, Error, Result};
use crate::game::{ee_value, enumerate_inputs};
use crate::operators::{
    apply_cnot, apply_hadamard, apply_u, input_count_log2, BitVector, BoolFn, PlayerInput,
    StateVector,
};

/// Largest `n` for the brute-force pair/witness loop.
pub const PROPOSITION2_BRUTE_FORCE_LIMIT: u32 = 2;
/// Largest `n` for the constructive-witness check over all pairs.
pub const PROPOSITION2_CONSTRUCTIVE_LIMIT: u32 = 3;
/// Largest `n` for the row-distinctness check.
pub const DISTINGUISHABILITY_LIMIT: u32 = 2;
/// Largest `n` for which every subset of the shattered set is enumerated.
pub const SHATTERING_LIMIT: u32 = 4;
/// Largest `n` accepted by [`q_eps_bound`].
pub const BOUND_TABLE_LIMIT: u32 = 62;

fn capacity(what: &'static str, requested: u32, limit: u32) -> Result<()> {
    if requested > limit {
        Err(Error::Capacity {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WitnessCase {
    DifferentX,
    DifferentF,
}

/// A Bob input `(y, g)` on which two Alice inputs give different answers.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Witness {
    pub y: BitVector,
    pub g: BoolFn,
    pub case_tag: WitnessCase,
}

/// `f1(y) ^ f2(y) ^ g(x1) ^ g(x2)`; true exactly when `(y, g)` separates the pair.
pub fn separation_sum(a1: &PlayerInput, a2: &PlayerInput, y: BitVector, g: &BoolFn) -> bool {
    a1.f.eval(y) ^ a2.f.eval(y) ^ g.eval(a1.x) ^ g.eval(a2.x)
}

impl Witness {
    pub fn separates(&self, a1: &PlayerInput, a2: &PlayerInput) -> bool {
        separation_sum(a1, a2, self.y, &self.g)
    }
}

/// Explicit separating Bob input for two distinct Alice inputs.
///
/// If the `x` parts differ, take `y = 0` and `g` the indicator of whichever
/// `x` is nonzero. Otherwise take a point where the `f` parts differ and the
/// zero `g`.
pub fn construct_witness(a1: &PlayerInput, a2: &PlayerInput) -> Result<Witness> {
    check_arity(a1.arity(), a2.arity())?;
    if a1 == a2 {
        return Err(Error::Contract("witness requested for identical inputs"));
    }
    let n = a1.arity();
    if a1.x != a2.x {
        let nonzero = if a1.x.is_zero() { a2.x } else { a1.x };
        return Ok(Witness {
            y: BitVector::zero(n),
            g: BoolFn::indicator(nonzero)?,
            case_tag: WitnessCase::DifferentX,
        });
    }
    let y =
        a1.f.first_difference(&a2.f)
            .ok_or(Error::Contract("inputs equal but no differing point"))?;
    Ok(Witness {
        y,
        g: BoolFn::zero(n)?,
        case_tag: WitnessCase::DifferentF,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Proposition2Method {
    Exhaustive,
    Constructive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Proposition2Outcome {
    pub n: u32,
    pub method: Proposition2Method,
    pub pairs_checked: u64,
    /// First unordered pair with no separating Bob input.
    pub counterexample: Option<(PlayerInput, PlayerInput)>,
}

impl Proposition2Outcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Every pair of distinct Alice inputs is separated by some Bob input.
///
/// Brute force for `n <= 2`, validated constructive witnesses at `n = 3`.
pub fn proposition2_exhaustive(n: u32) -> Result<Proposition2Outcome> {
    if n <= PROPOSITION2_BRUTE_FORCE_LIMIT {
        proposition2_brute_force(n, ee_value)
    } else {
        proposition2_constructive(n)
    }
}

/// Brute-force separation check for an arbitrary two-party function.
pub fn proposition2_brute_force<G>(n: u32, game: G) -> Result<Proposition2Outcome>
where
    G: Fn(&PlayerInput, &PlayerInput) -> bool,
{
    capacity(
        "brute-force separation check",
        n,
        PROPOSITION2_BRUTE_FORCE_LIMIT,
    )?;
    let inputs: Vec<PlayerInput> = enumerate_inputs(n)?.collect();
    let mut pairs_checked = 0;
    for (i, a1) in inputs.iter().enumerate() {
        for a2 in &inputs[i + 1..] {
            pairs_checked += 1;
            if !inputs.iter().any(|b| game(a1, b) != game(a2, b)) {
                return Ok(Proposition2Outcome {
                    n,
                    method: Proposition2Method::Exhaustive,
                    pairs_checked,
                    counterexample: Some((a1.clone(), a2.clone())),
                });
            }
        }
    }
    Ok(Proposition2Outcome {
        n,
        method: Proposition2Method::Exhaustive,
        pairs_checked,
        counterexample: None,
    })
}

/// Builds and validates a witness for every unordered pair of inputs.
pub fn proposition2_constructive(n: u32) -> Result<Proposition2Outcome> {
    capacity(
        "constructive separation check",
        n,
        PROPOSITION2_CONSTRUCTIVE_LIMIT,
    )?;
    let inputs: Vec<PlayerInput> = enumerate_inputs(n)?.collect();
    let mut pairs_checked = 0;
    let mut counterexample = None;
    'outer: for (i, a1) in inputs.iter().enumerate() {
        for a2 in &inputs[i + 1..] {
            pairs_checked += 1;
            let w = construct_witness(a1, a2)?;
            let bob = PlayerInput::new(w.y, w.g.clone())?;
            if !w.separates(a1, a2) || ee_value(a1, &bob) == ee_value(a2, &bob) {
                counterexample = Some((a1.clone(), a2.clone()));
                break 'outer;
            }
        }
    }
    Ok(Proposition2Outcome {
        n,
        method: Proposition2Method::Constructive,
        pairs_checked,
        counterexample,
    })
}

/// Minimum dimension and qubit count for zero-error one-way transmission of
/// one of `input_count` perfectly distinguishable messages with shared
/// entanglement: `d = ceil(sqrt(|X|))`, `q = ceil(log2 d)`.
pub fn lemma1_bounds(input_count: u128) -> Result<(u128, u32)> {
    if input_count == 0 {
        return Err(Error::Contract("input count must be at least 1"));
    }
    let root = input_count.isqrt();
    let dimension = if root * root == input_count {
        root
    } else {
        root + 1
    };
    Ok((dimension, ceil_log2(dimension)))
}

fn ceil_log2(v: u128) -> u32 {
    if v <= 1 {
        0
    } else {
        128 - (v - 1).leading_zeros()
    }
}

/// Qubit count from [`lemma1_bounds`] when `|X| = 2^k`, which is `ceil(k / 2)`.
pub fn lemma1_qubits_for_pow2(k: u64) -> u64 {
    k.div_ceil(2)
}

/// True when the rows `b -> game(a, b)` are pairwise distinct over all Alice inputs.
pub fn distinguishability_premise_check(n: u32) -> Result<bool> {
    distinguishability_with_game(n, ee_value)
}

pub fn distinguishability_with_game<G>(n: u32, game: G) -> Result<bool>
where
    G: Fn(&PlayerInput, &PlayerInput) -> bool,
{
    capacity("row distinctness check", n, DISTINGUISHABILITY_LIMIT)?;
    let inputs: Vec<PlayerInput> = enumerate_inputs(n)?.collect();
    let mut rows = BTreeSet::new();
    for a in &inputs {
        let mut row = alloc::vec![0u64; inputs.len().div_ceil(64)];
        for (j, b) in inputs.iter().enumerate() {
            if game(a, b) {
                row[j / 64] |= 1 << (j % 64);
            }
        }
        if !rows.insert(row) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DenseCodingTrial {
    pub message: u8,
    pub decoded: u8,
    /// Probability of the decoded outcome.
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DenseCodingReport {
    pub trials: Vec<DenseCodingTrial>,
    pub qubits_sent: u32,
    pub bits_decoded: u32,
    pub passed: bool,
}

/// Sends a two-bit message through one half of a Bell pair.
///
/// Qubit 0 is Alice's half, qubit 1 Bob's. Alice applies `X^(m & 1)
/// Z^(m >> 1)` to her half and sends it; Bob undoes the Bell preparation and
/// reads both qubits. With `encode == false` Alice's operation is skipped.
pub fn dense_coding_transmit(message: u8, encode: bool) -> Result<DenseCodingTrial> {
    if message > 3 {
        return Err(Error::Contract("dense coding carries two bits"));
    }
    let bell = apply_cnot(0, 1, apply_hadamard(0, StateVector::zero_state(2)?)?)?;
    let sent = if encode {
        let alice_op = PlayerInput::new(
            BitVector::new(u64::from(message & 1), 2)?,
            BoolFn::from_fn(2, |z| message >> 1 == 1 && z.component(1))?,
        )?;
        apply_u(&alice_op, bell)?
    } else {
        bell
    };
    let measured = apply_hadamard(0, apply_cnot(0, 1, sent)?)?;
    let (outcome, probability) =
        (0..4)
            .map(|k| (k, measured.probability(k)))
            .fold(
                (0, f64::MIN),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
    // qubit 1 carries the X bit, qubit 0 the Z bit
    let decoded = ((outcome >> 1) | ((outcome & 1) << 1)) as u8;
    Ok(DenseCodingTrial {
        message,
        decoded,
        probability,
    })
}

pub fn dense_coding_demo_with(encode: bool) -> Result<DenseCodingReport> {
    let trials = (0..4)
        .map(|m| dense_coding_transmit(m, encode))
        .collect::<Result<Vec<_>>>()?;
    let passed = trials
        .iter()
        .all(|t| t.decoded == t.message && t.probability >= 1.0 - 1e-12);
    Ok(DenseCodingReport {
        trials,
        qubits_sent: 1,
        bits_decoded: 2,
        passed,
    })
}

pub fn dense_coding_demo() -> Result<DenseCodingReport> {
    dense_coding_demo_with(true)
}

/// A column set `S` and, for every subset `R` of it, a row that is 1 exactly on `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ShatteringCertificate {
    pub n: u32,
    pub columns: Vec<PlayerInput>,
    /// `(mask, row)`: bit `i` of `mask` says whether `columns[i]` is in `R`.
    pub assignments: Vec<(u64, PlayerInput)>,
    pub verified_size: u64,
}

/// Re-checks a certificate using only [`ee_value`].
pub fn verify_certificate(cert: &ShatteringCertificate) -> bool {
    let size = cert.columns.len();
    if size >= 64 || cert.assignments.len() != 1usize << size {
        return false;
    }
    let mut seen = BTreeSet::new();
    for (mask, row) in &cert.assignments {
        if *mask >> size != 0 || !seen.insert(*mask) {
            return false;
        }
        if row.arity() != cert.n || cert.columns.iter().any(|c| c.arity() != cert.n) {
            return false;
        }
        for (i, column) in cert.columns.iter().enumerate() {
            if ee_value(row, column) != ((mask >> i) & 1 == 1) {
                return false;
            }
        }
    }
    true
}

/// Shatters `S = {(y, 0) : y != 0}` with rows `(0, indicator of R)`.
pub fn vc_shattering(n: u32) -> Result<ShatteringCertificate> {
    capacity("shattering certificate", n, SHATTERING_LIMIT)?;
    if n == 0 {
        return Err(Error::Contract("n must be at least 1"));
    }
    let zero_fn = BoolFn::zero(n)?;
    let columns: Vec<PlayerInput> = BitVector::all(n)
        .filter(|y| !y.is_zero())
        .map(|y| PlayerInput::new(y, zero_fn.clone()))
        .collect::<Result<_>>()?;
    let size = columns.len();
    let assignments = (0..1u64 << size)
        .map(|mask| {
            let f = BoolFn::from_fn(n, |z| {
                columns
                    .iter()
                    .position(|c| c.x == z)
                    .is_some_and(|i| (mask >> i) & 1 == 1)
            })?;
            Ok((mask, PlayerInput::new(BitVector::zero(n), f)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cert = ShatteringCertificate {
        n,
        columns,
        assignments,
        verified_size: 0,
    };
    if verify_certificate(&cert) {
        cert.verified_size = size as u64;
    }
    Ok(cert)
}

/// `-eps log2 eps - (1 - eps) log2 (1 - eps)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(eps: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * libm::log2(p) };
    term(eps) + term(1.0 - eps)
}

/// One row of the separation table.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub n: u32,
    pub epsilon: f64,
    pub binary_entropy: f64,
    /// `log2 |X|` for Alice's input set, `2^n + n - 1`.
    pub log2_inputs: u64,
    /// `ceil(sqrt(|X|))`, when `|X|` fits in 128 bits.
    pub lemma1_dimension: Option<u128>,
    pub lemma1_qubits: u64,
    pub deterministic_causal_qubits: f64,
    pub vc_paper_bound: u64,
    pub vc_verified: Option<u64>,
    pub q_eps_lower_bound: f64,
    pub switch_qubits: u64,
    pub separation_ratio: f64,
}

impl BoundReport {
    /// Records the size of a certificate that re-verifies for this `n`.
    pub fn attach_shattering(&mut self, cert: &ShatteringCertificate) -> bool {
        let ok = cert.n == self.n && verify_certificate(cert);
        if ok {
            self.vc_verified = Some(cert.columns.len() as u64);
        }
        ok
    }
}

/// Fills a [`BoundReport`] for arity `n` and error `eps` in `[0, 1/2]`.
pub fn q_eps_bound(n: u32, eps: f64) -> Result<BoundReport> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::Epsilon(eps));
    }
    if n == 0 {
        return Err(Error::Contract("n must be at least 1"));
    }
    capacity("bound table", n, BOUND_TABLE_LIMIT)?;
    let h = binary_entropy(eps);
    let log2_inputs = input_count_log2(n);
    let lemma1_dimension = if log2_inputs < 128 {
        Some(lemma1_bounds(1u128 << log2_inputs)?.0)
    } else {
        None
    };
    let q = (1.0 - h) * libm::exp2(f64::from(n) - 2.0);
    Ok(BoundReport {
        n,
        epsilon: eps,
        binary_entropy: h,
        log2_inputs,
        lemma1_dimension,
        lemma1_qubits: lemma1_qubits_for_pow2(log2_inputs),
        deterministic_causal_qubits: log2_inputs as f64 / 2.0,
        vc_paper_bound: 1u64 << (n - 1),
        vc_verified: None,
        q_eps_lower_bound: q,
        switch_qubits: u64::from(n),
        separation_ratio: q / f64::from(n),
    })
}
