//! The quantum switch: a control qubit in `|+>` decides whether the target
//! sees `U_B U_A` or `U_A U_B`. A Hadamard on the control then maps the
//! anticommutator part to outcome 0 and the commutator part to outcome 1.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use rand_core::RngCore;

use crate::error::{check_arity, Error, Result};
use crate::operators::{apply_hadamard, Operator, PlayerInput, StateVector, MAX_ARITY};

/// Threshold on `max(p0, p1)` above which an outcome counts as deterministic.
pub const DETERMINISTIC_TOLERANCE: f64 = 1e-12;

/// Norm below which a commutator or anticommutator is treated as zero.
pub const CLASSIFY_TOLERANCE: f64 = 1e-9;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Distribution of the control-qubit measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SwitchOutcome {
    pub p0: f64,
    pub p1: f64,
    pub decoded_bit: u8,
    pub deterministic: bool,
}

impl SwitchOutcome {
    fn from_probabilities(p0: f64, p1: f64) -> Self {
        let p0 = p0.clamp(0.0, 1.0);
        let p1 = p1.clamp(0.0, 1.0);
        Self {
            p0,
            p1,
            decoded_bit: u8::from(p1 > p0),
            deterministic: p0.max(p1) >= 1.0 - DETERMINISTIC_TOLERANCE,
        }
    }

    fn certain(bit: bool) -> Self {
        let (p0, p1) = if bit { (0.0, 1.0) } else { (1.0, 0.0) };
        Self {
            p0,
            p1,
            decoded_bit: u8::from(bit),
            deterministic: true,
        }
    }

    /// `1 - max(p0, p1)`.
    pub fn deviation(&self) -> f64 {
        1.0 - self.p0.max(self.p1)
    }

    /// Draws a measurement result from the distribution.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u8 {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        u8::from(u >= self.p0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CommutationClass {
    CommutingOnPsi,
    AnticommutingOnPsi,
    Neither,
}

fn check_operands<A: Operator, B: Operator>(a: &A, b: &B, psi: &StateVector) -> Result<()> {
    check_arity(psi.qubits(), a.qubits())?;
    check_arity(psi.qubits(), b.qubits())?;
    let norm_sqr = psi.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// `(U_B U_A psi, U_A U_B psi)`.
pub fn branch_states<A: Operator, B: Operator>(
    a: &A,
    b: &B,
    psi: &StateVector,
) -> Result<(StateVector, StateVector)> {
    let b_after_a = b.apply(a.apply(psi.clone())?)?;
    let a_after_b = a.apply(b.apply(psi.clone())?)?;
    Ok((b_after_a, a_after_b))
}

/// Joint control/target state after `V(U_A, U_B)` and the Hadamard on the
/// control. The control is the most significant qubit.
pub fn switch_final_state<A: Operator, B: Operator>(
    a: &A,
    b: &B,
    psi: &StateVector,
) -> Result<StateVector> {
    check_operands(a, b, psi)?;
    let n = psi.qubits();
    if n + 1 > MAX_ARITY {
        return Err(Error::Capacity {
            what: "switch register (target + control)",
            requested: n,
            limit: MAX_ARITY - 1,
        });
    }
    let dim = psi.amplitudes().len();

    // |+>_c (x) |psi>_t
    let half: Vec<_> = psi.amplitudes().iter().map(|a| a * FRAC_1_SQRT_2).collect();
    let mut joint = half.clone();
    joint.extend_from_slice(&half);

    // V(U_A, U_B) = |0><0| (x) U_B U_A + |1><1| (x) U_A U_B
    let upper = joint.split_off(dim);
    let lower = StateVector::from_amplitudes(joint)?;
    let upper = StateVector::from_amplitudes(upper)?;
    let lower = b.apply(a.apply(lower)?)?;
    let upper = a.apply(b.apply(upper)?)?;
    let mut joint = lower.into_amplitudes();
    joint.extend(upper.into_amplitudes());

    apply_hadamard(n, StateVector::from_amplitudes(joint)?)
}

/// Runs the switch on `psi` and returns the control-qubit distribution.
pub fn run_switch<A: Operator, B: Operator>(
    a: &A,
    b: &B,
    psi: &StateVector,
) -> Result<SwitchOutcome> {
    let state = switch_final_state(a, b, psi)?;
    let dim = psi.amplitudes().len();
    let (lower, upper) = state.amplitudes().split_at(dim);
    let p0: f64 = lower.iter().map(|a| a.norm_sqr()).sum();
    let p1: f64 = upper.iter().map(|a| a.norm_sqr()).sum();
    Ok(SwitchOutcome::from_probabilities(p0, p1))
}

/// Closed form on the target `|0...0>`: both orders give `|x ^ y>` up to the
/// signs `(-1)^f_A(x_B)` and `(-1)^f_B(x_A)`, so the outcome is their XOR.
pub fn run_switch_fast(a: &PlayerInput, b: &PlayerInput) -> Result<SwitchOutcome> {
    check_arity(a.arity(), b.arity())?;
    let bit = a.f.eval(b.x) ^ b.f.eval(a.x);
    Ok(SwitchOutcome::certain(bit))
}

pub fn classify_commutation<A: Operator, B: Operator>(
    a: &A,
    b: &B,
    psi: &StateVector,
) -> Result<CommutationClass> {
    check_operands(a, b, psi)?;
    let (ba, ab) = branch_states(a, b, psi)?;
    let mut commutator = 0.0;
    let mut anticommutator = 0.0;
    for (x, y) in ab.amplitudes().iter().zip(ba.amplitudes()) {
        commutator += (x - y).norm_sqr();
        anticommutator += (x + y).norm_sqr();
    }
    Ok(if libm::sqrt(commutator) <= CLASSIFY_TOLERANCE {
        CommutationClass::CommutingOnPsi
    } else if libm::sqrt(anticommutator) <= CLASSIFY_TOLERANCE {
        CommutationClass::AnticommutingOnPsi
    } else {
        CommutationClass::Neither
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{BitVector, BoolFn, DenseMatrix};
    use alloc::vec;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn input(x: u64, table: u64, n: u32) -> PlayerInput {
        PlayerInput::new(
            BitVector::new(x, n).unwrap(),
            BoolFn::from_table(n, table).unwrap(),
        )
        .unwrap()
    }

    fn random_input(n: u32, rng: &mut ChaCha8Rng) -> PlayerInput {
        PlayerInput::new(BitVector::random(n, rng), BoolFn::random(n, rng).unwrap()).unwrap()
    }

    #[test]
    fn equal_operators_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for n in 1..=3 {
            for _ in 0..20 {
                let u = random_input(n, &mut rng);
                let psi = StateVector::random(n, &mut rng).unwrap();
                let out = run_switch(&u, &u, &psi).unwrap();
                assert!((out.p0 - 1.0).abs() < 1e-12);
                assert_eq!(out.decoded_bit, 0);
                assert_eq!(
                    classify_commutation(&u, &u, &psi).unwrap(),
                    CommutationClass::CommutingOnPsi
                );
            }
        }
    }

    #[test]
    fn x_and_z_anticommute() {
        let x = input(1, 0, 1);
        let z = input(0, 0b10, 1);
        let psi = StateVector::zero_state(1).unwrap();
        let out = run_switch(&x, &z, &psi).unwrap();
        assert!((out.p1 - 1.0).abs() < 1e-12);
        assert_eq!(out.decoded_bit, 1);
        assert!(out.deterministic);
        assert_eq!(
            classify_commutation(&x, &z, &psi).unwrap(),
            CommutationClass::AnticommutingOnPsi
        );
    }

    #[test]
    fn fast_path_small_cases() {
        let id = PlayerInput::identity(1).unwrap();
        assert_eq!(run_switch_fast(&id, &id).unwrap().decoded_bit, 0);

        let a = input(1, 0b10, 1);
        let b = input(1, 0, 1);
        assert_eq!(run_switch_fast(&a, &b).unwrap().decoded_bit, 1);
        // XZ and X anticommute as 2x2 matrices
        let ma = crate::operators::dense_matrix(&a);
        let mb = crate::operators::dense_matrix(&b);
        let anti = ma.mul(&mb).unwrap();
        let rev = mb.mul(&ma).unwrap();
        for (p, q) in anti.entries().iter().zip(rev.entries()) {
            assert_eq!(*p, -*q);
        }
    }

    #[test]
    fn neither_for_hadamard_against_x() {
        let h = FRAC_1_SQRT_2;
        let had = DenseMatrix::from_rows(
            2,
            vec![
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(h, 0.0),
                Complex64::new(-h, 0.0),
            ],
        )
        .unwrap();
        let x = input(1, 0, 1);
        let psi = StateVector::zero_state(1).unwrap();
        // HX|0> = |->, XH|0> = |+>: commutator and anticommutator both have norm sqrt(2)
        assert_eq!(
            classify_commutation(&x, &had, &psi).unwrap(),
            CommutationClass::Neither
        );
        let out = run_switch(&x, &had, &psi).unwrap();
        assert!((out.p0 - 0.5).abs() < 1e-12);
        assert!(!out.deterministic);
    }

    #[test]
    fn rejects_bad_operands() {
        let a = PlayerInput::identity(2).unwrap();
        let b = PlayerInput::identity(3).unwrap();
        let psi = StateVector::zero_state(2).unwrap();
        assert!(matches!(
            run_switch(&a, &b, &psi),
            Err(Error::ArityMismatch { .. })
        ));
        assert!(run_switch_fast(&a, &b).is_err());
        let unnormalized = StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        assert!(matches!(
            run_switch(&a, &a, &unnormalized),
            Err(Error::NotNormalized { .. })
        ));
        assert!(classify_commutation(&a, &a, &unnormalized).is_err());
    }

    #[test]
    fn sampling_follows_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let certain = SwitchOutcome::certain(true);
        assert!((0..100).all(|_| certain.sample(&mut rng) == 1));
        let half = SwitchOutcome::from_probabilities(0.5, 0.5);
        let ones: u32 = (0..10_000).map(|_| u32::from(half.sample(&mut rng))).sum();
        assert!((4_700..5_300).contains(&ones));
    }
}
