//! Simulation and verification core for the Exchange Evaluation game.
//!
//! Player inputs `(x, f)` are encoded as the signed permutations `X(x)D(f)`,
//! and the quantum switch lets a referee learn `f(y) ^ g(x)` from `n` qubits
//! of communication. Alongside the protocol this crate carries the
//! combinatorial checks behind the causally-ordered lower bounds: row
//! distinctness, constructive separating witnesses, VC shattering and the
//! bounded-error bound table.
//!
//! The crate is `no_std` and only needs `alloc`. Timing, parallel sweeps and
//! file formats live in the `qswitch-cli` crate.
//!
//! Basis convention: component `z_1` of a bit vector is the least significant
//! bit of the basis index, and the control qubit of the switch register is the
//! most significant qubit.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod counters;
mod error;
pub mod game;
pub mod operators;
pub mod switch;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Absolute tolerance used for amplitude comparisons.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-12;
