//! The Exchange Evaluation game `EE_n(x, f, y, g) = f(y) ^ g(x)`.
//!
//! Besides direct evaluation this module enumerates and samples player
//! inputs, checks the switch protocol pair by pair, and simulates the two
//! classical baselines (two-way exchange and one-way full forwarding).

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{check_arity, Error, Result};
use crate::operators::{input_count_log2, BitVector, BoolFn, PlayerInput, StateVector, MAX_ARITY};
use crate::switch::{run_switch, run_switch_fast};

/// Largest `n` for which [`enumerate_inputs`] will run.
pub const ENUMERATION_LIMIT: u32 = 4;
/// Largest `n` for an exhaustive sweep through the state-vector path.
pub const FULL_EXHAUSTIVE_LIMIT: u32 = 2;
/// Largest `n` for an exhaustive sweep through the closed-form path.
pub const FAST_EXHAUSTIVE_LIMIT: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GameInstance {
    pub alice: PlayerInput,
    pub bob: PlayerInput,
}

impl GameInstance {
    pub fn new(alice: PlayerInput, bob: PlayerInput) -> Result<Self> {
        check_arity(alice.arity(), bob.arity())?;
        Ok(Self { alice, bob })
    }

    pub fn n(&self) -> u32 {
        self.alice.arity()
    }
}

/// `f(y) ^ g(x)` for Alice's `(x, f)` and Bob's `(y, g)`.
#[inline]
pub fn ee_value(alice: &PlayerInput, bob: &PlayerInput) -> bool {
    alice.f.eval(bob.x) ^ bob.f.eval(alice.x)
}

pub fn ee_eval(inst: &GameInstance) -> bool {
    ee_value(&inst.alice, &inst.bob)
}

/// Every `(x, f)` for arity `n`, ordered by `x` and then by the table of `f`.
#[derive(Clone, Debug)]
pub struct Inputs {
    n: u32,
    next: u64,
    total: u64,
}

impl Iterator for Inputs {
    type Item = PlayerInput;

    fn next(&mut self) -> Option<PlayerInput> {
        if self.next >= self.total {
            return None;
        }
        let fn_bits = (1u32 << self.n) - 1;
        let x = self.next >> fn_bits;
        let table = (self.next & ((1u64 << fn_bits) - 1)) << 1;
        self.next += 1;
        Some(PlayerInput {
            x: BitVector::new(x, self.n).expect("x within arity"),
            f: BoolFn::from_table(self.n, table).expect("table within arity"),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Inputs {}

pub fn enumerate_inputs(n: u32) -> Result<Inputs> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            what: "input enumeration",
            requested: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(Inputs {
        n,
        next: 0,
        total: 1u64 << input_count_log2(n),
    })
}

/// Uniform sample from the `2^(2^n + n - 1)` valid inputs.
pub fn sample_input<R: RngCore + ?Sized>(n: u32, rng: &mut R) -> Result<PlayerInput> {
    if n > MAX_ARITY {
        return Err(Error::Capacity {
            what: "input sampling",
            requested: n,
            limit: MAX_ARITY,
        });
    }
    let x = BitVector::random(n, rng);
    let f = BoolFn::random(n, rng)?;
    Ok(PlayerInput { x, f })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SweepMode {
    Exhaustive,
    Sampled,
}

/// Which switch implementation a sweep checks.
///
/// `Fast` compares the closed form against `ee_eval`. `Full` additionally
/// runs the state-vector switch on `|0...0>` and requires it to agree with
/// the closed form, with `1 - max(p0, p1)` inside the sweep tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SwitchPath {
    Fast,
    Full,
}

impl SwitchPath {
    pub fn default_for(n: u32) -> Self {
        if n <= FULL_EXHAUSTIVE_LIMIT {
            SwitchPath::Full
        } else {
            SwitchPath::Fast
        }
    }
}

impl SweepMode {
    pub fn default_for(n: u32) -> Self {
        if n <= FULL_EXHAUSTIVE_LIMIT {
            SweepMode::Exhaustive
        } else {
            SweepMode::Sampled
        }
    }
}

/// Rejects sweep requests beyond the documented capacity.
pub fn check_sweep_request(n: u32, mode: SweepMode, path: SwitchPath) -> Result<()> {
    let (what, limit) = match (mode, path) {
        (SweepMode::Exhaustive, SwitchPath::Full) => {
            ("exhaustive sweep (full path)", FULL_EXHAUSTIVE_LIMIT)
        }
        (SweepMode::Exhaustive, SwitchPath::Fast) => {
            ("exhaustive sweep (fast path)", FAST_EXHAUSTIVE_LIMIT)
        }
        (SweepMode::Sampled, SwitchPath::Full) => ("sampled sweep (full path)", MAX_ARITY - 1),
        (SweepMode::Sampled, SwitchPath::Fast) => ("sampled sweep (fast path)", MAX_ARITY),
    };
    if n == 0 {
        return Err(Error::Contract("n must be at least 1"));
    }
    if n > limit {
        return Err(Error::Capacity {
            what,
            requested: n,
            limit,
        });
    }
    Ok(())
}

/// Aggregated result of checking a batch of input pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTally {
    pub pairs_tested: u64,
    pub failures: u64,
    pub max_probability_deviation: f64,
    pub first_failure: Option<GameInstance>,
}

impl SweepTally {
    /// Associative merge; `first_failure` keeps the left operand's when both have one.
    pub fn merge(mut self, other: SweepTally) -> SweepTally {
        self.pairs_tested += other.pairs_tested;
        self.failures += other.failures;
        self.max_probability_deviation = self
            .max_probability_deviation
            .max(other.max_probability_deviation);
        if self.first_failure.is_none() {
            self.first_failure = other.first_failure;
        }
        self
    }
}

/// Checks one ordered pair. Returns `(passed, probability deviation)`; a pair
/// passes when every decoded bit equals `EE_n` and `1 - max(p0, p1)` stays
/// within `tolerance`.
pub fn check_pair(
    alice: &PlayerInput,
    bob: &PlayerInput,
    path: SwitchPath,
    tolerance: f64,
) -> Result<(bool, f64)> {
    let expected = u8::from(ee_value(alice, bob));
    let fast = run_switch_fast(alice, bob)?;
    let mut ok = fast.decoded_bit == expected;
    let mut deviation = fast.deviation();
    if path == SwitchPath::Full {
        let psi = StateVector::zero_state(alice.arity())?;
        let full = run_switch(alice, bob, &psi)?;
        ok &= full.decoded_bit == fast.decoded_bit;
        deviation = deviation.max(full.deviation());
    }
    Ok((ok && deviation <= tolerance, deviation))
}

/// Sequential sweep over an arbitrary stream of pairs.
pub fn verify_pairs<I>(pairs: I, path: SwitchPath, tolerance: f64) -> Result<SweepTally>
where
    I: IntoIterator<Item = (PlayerInput, PlayerInput)>,
{
    let mut tally = SweepTally::default();
    for (alice, bob) in pairs {
        let (ok, deviation) = check_pair(&alice, &bob, path, tolerance)?;
        tally.pairs_tested += 1;
        tally.max_probability_deviation = tally.max_probability_deviation.max(deviation);
        if !ok {
            tally.failures += 1;
            if tally.first_failure.is_none() {
                tally.first_failure = Some(GameInstance { alice, bob });
            }
        }
    }
    Ok(tally)
}

/// All ordered pairs of inputs at arity `n`.
pub fn exhaustive_pairs(n: u32) -> Result<impl Iterator<Item = (PlayerInput, PlayerInput)>> {
    let inputs: Vec<PlayerInput> = enumerate_inputs(n)?.collect();
    let bobs = inputs.clone();
    Ok(inputs
        .into_iter()
        .flat_map(move |a| bobs.clone().into_iter().map(move |b| (a.clone(), b))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Party {
    Alice,
    Bob,
    Charlie,
}

/// One message in a protocol transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SendEvent {
    pub sender: Party,
    pub destination: Party,
    pub bits: u64,
}

impl SendEvent {
    fn new(sender: Party, destination: Party, bits: u64) -> Self {
        Self {
            sender,
            destination,
            bits,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoWayRun {
    pub answer: bool,
    pub bits_communicated: u64,
    pub trace: Vec<SendEvent>,
}

/// Alice and Bob swap `x` and `y`, evaluate locally, and each sends one bit
/// to Charlie (Alice first).
pub fn two_way_baseline(inst: &GameInstance) -> Result<TwoWayRun> {
    check_arity(inst.alice.arity(), inst.bob.arity())?;
    let n = u64::from(inst.n());
    let mut trace = Vec::with_capacity(4);

    let at_bob = BitVector::new(inst.alice.x.bits(), inst.n())?;
    trace.push(SendEvent::new(Party::Alice, Party::Bob, n));
    let at_alice = BitVector::new(inst.bob.x.bits(), inst.n())?;
    trace.push(SendEvent::new(Party::Bob, Party::Alice, n));

    let alice_bit = inst.alice.f.eval(at_alice);
    trace.push(SendEvent::new(Party::Alice, Party::Charlie, 1));
    let bob_bit = inst.bob.f.eval(at_bob);
    trace.push(SendEvent::new(Party::Bob, Party::Charlie, 1));

    let bits_communicated = trace.iter().map(|e| e.bits).sum();
    Ok(TwoWayRun {
        answer: alice_bit ^ bob_bit,
        bits_communicated,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OneWayRun {
    pub answer: bool,
    /// Classical bits Alice sends to Bob: `2^n + n - 1`.
    pub alice_to_bob_bits: u64,
    /// The same message dense coded: `ceil((2^n + n - 1) / 2)` qubits.
    pub qubits_communicated: u64,
    pub trace: Vec<SendEvent>,
}

/// Serialises `(x, f)` as `n` bits of `x` followed by `f(z)` for every
/// nonzero `z`.
pub fn encode_input(input: &PlayerInput) -> Vec<bool> {
    let n = input.arity();
    let mut bits: Vec<bool> = (1..=n).map(|i| input.x.component(i)).collect();
    bits.extend((1..input.f.len()).map(|z| input.f.get(z)));
    bits
}

pub fn decode_input(n: u32, bits: &[bool]) -> Result<PlayerInput> {
    if n > MAX_ARITY || bits.len() as u64 != input_count_log2(n) {
        return Err(Error::Encoding("message length does not match arity"));
    }
    let (xs, fs) = bits.split_at(n as usize);
    let x = BitVector::from_components(xs)?;
    let f = BoolFn::from_fn(n, |z| z.index() != 0 && fs[z.index() - 1])?;
    PlayerInput::new(x, f)
}

/// Alice forwards her whole input to Bob, who answers Charlie with one bit.
pub fn one_way_identity_baseline(inst: &GameInstance) -> Result<OneWayRun> {
    check_arity(inst.alice.arity(), inst.bob.arity())?;
    let message = encode_input(&inst.alice);
    let alice_to_bob_bits = message.len() as u64;
    let received = decode_input(inst.n(), &message)?;
    let answer = received.f.eval(inst.bob.x) ^ inst.bob.f.eval(received.x);
    Ok(OneWayRun {
        answer,
        alice_to_bob_bits,
        qubits_communicated: alice_to_bob_bits.div_ceil(2),
        trace: alloc::vec![
            SendEvent::new(Party::Alice, Party::Bob, alice_to_bob_bits),
            SendEvent::new(Party::Bob, Party::Charlie, 1),
        ],
    })
}

/// Communication cost of the three protocols at arity `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProtocolCosts {
    pub switch_qubits: u64,
    pub one_way_qubits: u64,
    pub two_way_bits: u64,
}

pub fn protocol_costs(n: u32) -> ProtocolCosts {
    ProtocolCosts {
        switch_qubits: u64::from(n),
        one_way_qubits: input_count_log2(n).div_ceil(2),
        two_way_bits: 2 * u64::from(n) + 2,
    }
}
