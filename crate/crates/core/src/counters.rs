//! Qutrit channel-use counters at the output ports of Alice's and Bob's
//! laboratories. Each exit shifts the counter `|i> -> |i + 1 mod 3>`, so a
//! final reading of 2 exposes a laboratory that sent a system out twice.

use core::array;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::{one_way_identity_baseline, two_way_baseline, GameInstance, Party, SendEvent};
use crate::operators::{Operator, StateVector};

/// A qutrit counter register.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Counter {
    amplitudes: [Complex64; 3],
}

impl Default for Counter {
    fn default() -> Self {
        Self::new()
    }
}

impl Counter {
    /// `|0>`.
    pub fn new() -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); 3];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn increment(&mut self) {
        self.amplitudes.rotate_right(1);
    }

    /// `<N>` with `N = sum_i i |i><i|`.
    pub fn expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| i as f64 * a.norm_sqr())
            .sum()
    }

    /// The basis value, if the counter is in a basis state.
    pub fn definite_value(&self) -> Option<u8> {
        let ones: [bool; 3] =
            array::from_fn(|i| (self.amplitudes[i].norm_sqr() - 1.0).abs() < 1e-12);
        ones.iter().position(|&b| b).map(|i| i as u8)
    }
}

/// Alice's and Bob's counters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CounterState {
    pub alice: Counter,
    pub bob: Counter,
}

impl CounterState {
    fn record_exit(&mut self, party: Party) {
        match party {
            Party::Alice => self.alice.increment(),
            Party::Bob => self.bob.increment(),
            Party::Charlie => {}
        }
    }

    pub fn from_trace(trace: &[SendEvent]) -> Self {
        let mut state = Self::default();
        for event in trace {
            state.record_exit(event.sender);
        }
        state
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Protocol {
    Switch,
    OneWay,
    TwoWay,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Switch, Protocol::OneWay, Protocol::TwoWay];
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CounterReport {
    pub protocol: Protocol,
    pub alice_counter: u8,
    pub bob_counter: u8,
    pub expectation_n_alice: f64,
    pub expectation_n_bob: f64,
}

impl CounterReport {
    fn from_state(protocol: Protocol, state: &CounterState) -> Result<Self> {
        let (Some(alice_counter), Some(bob_counter)) =
            (state.alice.definite_value(), state.bob.definite_value())
        else {
            return Err(Error::CounterInconsistency);
        };
        Ok(Self {
            protocol,
            alice_counter,
            bob_counter,
            expectation_n_alice: state.alice.expectation(),
            expectation_n_bob: state.bob.expectation(),
        })
    }

    pub fn max_counter(&self) -> u8 {
        self.alice_counter.max(self.bob_counter)
    }
}

/// Counter tallies in the `|0>_c` (Alice first) and `|1>_c` (Bob first)
/// branches of the switch. The target starts in `|0...0>` and passes through
/// each laboratory once per branch.
pub fn switch_branch_counters(inst: &GameInstance) -> Result<[CounterState; 2]> {
    let orders = [[Party::Alice, Party::Bob], [Party::Bob, Party::Alice]];
    let mut out = [CounterState::default(); 2];
    for (order, tally) in orders.iter().zip(out.iter_mut()) {
        let mut target = StateVector::zero_state(inst.n())?;
        for &lab in order {
            target = match lab {
                Party::Alice => inst.alice.apply(target)?,
                _ => inst.bob.apply(target)?,
            };
            tally.record_exit(lab);
        }
    }
    Ok(out)
}

pub fn run_with_counters(protocol: Protocol, inst: &GameInstance) -> Result<CounterReport> {
    let state = match protocol {
        Protocol::Switch => {
            let [first, second] = switch_branch_counters(inst)?;
            if first != second {
                return Err(Error::CounterInconsistency);
            }
            first
        }
        Protocol::OneWay => CounterState::from_trace(&one_way_identity_baseline(inst)?.trace),
        Protocol::TwoWay => CounterState::from_trace(&two_way_baseline(inst)?.trace),
    };
    CounterReport::from_state(protocol, &state)
}

/// True when every single-use protocol reads at most 1 and two-way reads 2
/// on at least one counter.
pub fn discriminates(reports: &[CounterReport]) -> bool {
    reports.iter().all(|r| match r.protocol {
        Protocol::Switch | Protocol::OneWay => r.max_counter() == 1,
        Protocol::TwoWay => r.max_counter() >= 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{enumerate_inputs, sample_input};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counter_wraps_mod_three() {
        let mut c = Counter::new();
        for expected in [1u8, 2, 0, 1] {
            c.increment();
            assert_eq!(c.definite_value(), Some(expected));
            assert_eq!(c.expectation(), f64::from(expected));
        }
    }

    #[test]
    fn switch_and_one_way_read_one() {
        for n in 1..=2 {
            let all: Vec<_> = enumerate_inputs(n).unwrap().collect();
            for a in &all {
                for b in &all {
                    let inst = GameInstance::new(a.clone(), b.clone()).unwrap();
                    let [x, y] = switch_branch_counters(&inst).unwrap();
                    assert_eq!(x, y);
                    for p in [Protocol::Switch, Protocol::OneWay] {
                        let r = run_with_counters(p, &inst).unwrap();
                        assert_eq!((r.alice_counter, r.bob_counter), (1, 1));
                        assert_eq!((r.expectation_n_alice, r.expectation_n_bob), (1.0, 1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn two_way_reads_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..200 {
            let inst = GameInstance::new(
                sample_input(3, &mut rng).unwrap(),
                sample_input(3, &mut rng).unwrap(),
            )
            .unwrap();
            let reports: Vec<_> = Protocol::ALL
                .iter()
                .map(|&p| run_with_counters(p, &inst).unwrap())
                .collect();
            let two_way = reports[2];
            assert_eq!((two_way.alice_counter, two_way.bob_counter), (2, 2));
            assert!(two_way.expectation_n_alice >= 2.0 || two_way.expectation_n_bob >= 2.0);
            assert!(discriminates(&reports));
        }
    }

    #[test]
    fn superposed_counter_is_rejected() {
        let mut state = CounterState::default();
        state.alice.amplitudes = [
            Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        assert!(matches!(
            CounterReport::from_state(Protocol::Switch, &state),
            Err(Error::CounterInconsistency)
        ));
        assert!((state.alice.expectation() - 0.5).abs() < 1e-15);
    }
}
