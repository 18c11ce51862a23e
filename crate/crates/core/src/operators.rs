//! Bit vectors, truth tables and the signed permutations `X(x)D(f)`.
//!
//! `X(x)` acts on a state vector as an index XOR and `D(f)` as a sign mask,
//! so neither is ever materialised as a matrix. [`DenseMatrix`] exists as an
//! independent oracle for cross-checking the structured path.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::FRAC_1_SQRT_2;
use core::fmt;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::error::{check_arity, Error, Result};

/// Largest arity for truth tables and state vectors.
pub const MAX_ARITY: u32 = 24;

/// Largest arity a [`BitVector`] can hold.
pub const MAX_BITVECTOR_ARITY: u32 = 63;

fn check_table_arity(n: u32) -> Result<()> {
    if n > MAX_ARITY {
        return Err(Error::Capacity {
            what: "truth table / state vector",
            requested: n,
            limit: MAX_ARITY,
        });
    }
    Ok(())
}

/// An element of `Z_2^n`. Component `x_i` is stored in bit `i - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BitVector {
    #[cfg_attr(feature = "serde", serde(rename = "value"))]
    bits: u64,
    n: u32,
}

impl BitVector {
    pub fn new(bits: u64, n: u32) -> Result<Self> {
        if n > MAX_BITVECTOR_ARITY {
            return Err(Error::Capacity {
                what: "bit vector",
                requested: n,
                limit: MAX_BITVECTOR_ARITY,
            });
        }
        if bits >> n != 0 {
            return Err(Error::Contract("bit vector has bits set beyond its arity"));
        }
        Ok(Self { bits, n })
    }

    pub fn zero(n: u32) -> Self {
        assert!(n <= MAX_BITVECTOR_ARITY);
        Self { bits: 0, n }
    }

    /// Builds `(x_1, ..., x_n)` from its components in order.
    pub fn from_components(components: &[bool]) -> Result<Self> {
        let bits = components
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &c)| acc | (u64::from(c) << i));
        Self::new(bits, components.len() as u32)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Basis index of `|x>`.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Component `x_i`, 1-based.
    pub fn component(&self, i: u32) -> bool {
        assert!(i >= 1 && i <= self.n, "component index out of range");
        (self.bits >> (i - 1)) & 1 == 1
    }

    pub fn xor(self, other: Self) -> Result<Self> {
        check_arity(self.n, other.n)?;
        Ok(Self {
            bits: self.bits ^ other.bits,
            n: self.n,
        })
    }

    /// All `2^n` vectors in increasing index order.
    pub fn all(n: u32) -> impl Iterator<Item = BitVector> {
        assert!(n <= MAX_ARITY);
        (0..1u64 << n).map(move |bits| BitVector { bits, n })
    }

    pub fn random<R: RngCore + ?Sized>(n: u32, rng: &mut R) -> Self {
        assert!(n <= MAX_BITVECTOR_ARITY);
        let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        Self {
            bits: rng.next_u64() & mask,
            n,
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.bits, self.n)
    }
}

/// Truth table of a function `f: Z_2^n -> Z_2` with `f(0) = 0`.
///
/// Bit `index(z)` of the table holds `f(z)`. The table is packed into 64-bit
/// words, least significant word first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoolFn {
    n: u32,
    words: Vec<u64>,
}

fn word_count(n: u32) -> usize {
    if n <= 6 {
        1
    } else {
        1usize << (n - 6)
    }
}

fn valid_mask(n: u32) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << n)) - 1
    }
}

impl BoolFn {
    /// The zero function.
    pub fn zero(n: u32) -> Result<Self> {
        check_table_arity(n)?;
        Ok(Self {
            n,
            words: vec![0; word_count(n)],
        })
    }

    /// Builds from packed words, least significant first.
    pub fn from_words(n: u32, words: Vec<u64>) -> Result<Self> {
        check_table_arity(n)?;
        if words.len() != word_count(n) {
            return Err(Error::Encoding("wrong number of table words"));
        }
        if words[0] & !valid_mask(n) != 0 {
            return Err(Error::Encoding("table has bits beyond 2^n"));
        }
        if words[0] & 1 != 0 {
            return Err(Error::Contract("f(0) must be 0"));
        }
        Ok(Self { n, words })
    }

    /// Builds from a table that fits in one word (`n <= 6`).
    pub fn from_table(n: u32, table: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::Capacity {
                what: "single-word truth table",
                requested: n,
                limit: 6,
            });
        }
        Self::from_words(n, vec![table])
    }

    pub fn from_fn(n: u32, mut f: impl FnMut(BitVector) -> bool) -> Result<Self> {
        let mut table = Self::zero(n)?;
        for z in BitVector::all(n) {
            if f(z) {
                table.set(z.index(), true);
            }
        }
        if table.words[0] & 1 != 0 {
            return Err(Error::Contract("f(0) must be 0"));
        }
        Ok(table)
    }

    /// The indicator of a single nonzero point.
    pub fn indicator(point: BitVector) -> Result<Self> {
        if point.is_zero() {
            return Err(Error::Contract(
                "indicator of the zero vector is not in F_n",
            ));
        }
        let mut table = Self::zero(point.arity())?;
        table.set(point.index(), true);
        Ok(table)
    }

    /// Uniformly random element of `F_n`.
    pub fn random<R: RngCore + ?Sized>(n: u32, rng: &mut R) -> Result<Self> {
        check_table_arity(n)?;
        let mut words: Vec<u64> = (0..word_count(n)).map(|_| rng.next_u64()).collect();
        words[0] &= valid_mask(n) & !1;
        Ok(Self { n, words })
    }

    fn set(&mut self, index: usize, value: bool) {
        let (w, b) = (index / 64, index % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `f` at basis index `index`.
    #[inline]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len());
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    /// `f(z)`. Panics if the arities differ.
    #[inline]
    pub fn eval(&self, z: BitVector) -> bool {
        assert_eq!(self.n, z.arity(), "arity mismatch in BoolFn::eval");
        self.get(z.index())
    }

    /// Number of table entries, `2^n`.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Some point where the two functions differ, if any.
    pub fn first_difference(&self, other: &Self) -> Option<BitVector> {
        if self.n != other.n {
            return None;
        }
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| a != b)
            .map(|(w, (a, b))| {
                let bit = (a ^ b).trailing_zeros() as u64;
                BitVector {
                    bits: w as u64 * 64 + bit,
                    n: self.n,
                }
            })
    }

    /// Lowercase hex of the table read as an integer (bit 0 = `f` at index 0),
    /// zero padded to `max(1, 2^n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = (self.len() / 4).max(1);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nibble = (self.words[d / 16] >> ((d % 16) * 4)) & 0xf;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n: u32, hex: &str) -> Result<Self> {
        check_table_arity(n)?;
        let digits = ((1usize << n) / 4).max(1);
        if hex.len() != digits {
            return Err(Error::Encoding("hex length does not match arity"));
        }
        let mut words = vec![0u64; word_count(n)];
        for (pos, c) in hex.chars().rev().enumerate() {
            if c.is_ascii_uppercase() {
                return Err(Error::Encoding("hex must be lowercase"));
            }
            let nibble = c.to_digit(16).ok_or(Error::Encoding("invalid hex digit"))? as u64;
            words[pos / 16] |= nibble << ((pos % 16) * 4);
        }
        Self::from_words(n, words)
    }
}

impl PartialOrd for BoolFn {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by arity, then by the table read as an unsigned integer.
impl Ord for BoolFn {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl fmt::Display for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[cfg(feature = "serde")]
mod boolfn_serde {
    use super::BoolFn;
    use alloc::string::String;
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        n: u32,
        table: String,
    }

    impl Serialize for BoolFn {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            Repr {
                n: self.n,
                table: self.to_hex(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for BoolFn {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let repr = Repr::deserialize(d)?;
            BoolFn::from_hex(repr.n, &repr.table).map_err(de::Error::custom)
        }
    }
}

/// A player's input `(x, f)`, identified with the unitary `X(x)D(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlayerInput {
    pub x: BitVector,
    pub f: BoolFn,
}

impl PlayerInput {
    pub fn new(x: BitVector, f: BoolFn) -> Result<Self> {
        check_arity(x.arity(), f.arity())?;
        Ok(Self { x, f })
    }

    /// `(0, zero)`, the identity.
    pub fn identity(n: u32) -> Result<Self> {
        Ok(Self {
            x: BitVector::new(0, n)?,
            f: BoolFn::zero(n)?,
        })
    }

    pub fn arity(&self) -> u32 {
        self.x.arity()
    }
}

/// `2^(2^n + n - 1)`, the number of distinct player inputs, as a power of two.
pub fn input_count_log2(n: u32) -> u64 {
    (1u64 << n) + u64::from(n) - 1
}

/// Pure state on `m` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    m: u32,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(m: u32, index: usize) -> Result<Self> {
        check_table_arity(m)?;
        if index >= 1usize << m {
            return Err(Error::Contract("basis index out of range"));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << m];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { m, amplitudes })
    }

    /// `|0...0>`.
    pub fn zero_state(m: u32) -> Result<Self> {
        Self::basis(m, 0)
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Contract("amplitude count must be a power of two"));
        }
        let m = len.trailing_zeros();
        check_table_arity(m)?;
        Ok(Self { m, amplitudes })
    }

    /// Haar-random pure state (normalised complex Gaussian vector).
    pub fn random<R: RngCore + ?Sized>(m: u32, rng: &mut R) -> Result<Self> {
        check_table_arity(m)?;
        let mut amplitudes: Vec<Complex64> = (0..1usize << m)
            .map(|_| {
                let (a, b) = gaussian_pair(rng);
                Complex64::new(a, b)
            })
            .collect();
        let norm = libm::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>());
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { m, amplitudes })
    }

    pub fn qubits(&self) -> u32 {
        self.m
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    /// Largest entrywise modulus of `self - other`; infinite on a size mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.m != other.m {
            return f64::INFINITY;
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

fn uniform_open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    // 53 random mantissa bits, shifted off zero
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn gaussian_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1 = uniform_open01(rng);
    let u2 = uniform_open01(rng);
    let r = libm::sqrt(-2.0 * libm::log(u1));
    let theta = 2.0 * core::f64::consts::PI * u2;
    (r * libm::cos(theta), r * libm::sin(theta))
}

/// `X(x)`: amplitude `k` of the result is amplitude `k ^ x` of the input.
pub fn apply_x(x: BitVector, mut s: StateVector) -> Result<StateVector> {
    check_arity(s.m, x.arity())?;
    let mask = x.index();
    if mask != 0 {
        for k in 0..s.amplitudes.len() {
            let j = k ^ mask;
            if k < j {
                s.amplitudes.swap(k, j);
            }
        }
    }
    Ok(s)
}

/// `D(f)`: amplitude `k` is multiplied by `(-1)^f(k)`.
pub fn apply_diag(f: &BoolFn, mut s: StateVector) -> Result<StateVector> {
    check_arity(s.m, f.arity())?;
    for (w, &word) in f.words().iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            let k = w * 64 + b;
            s.amplitudes[k] = -s.amplitudes[k];
            bits &= bits - 1;
        }
    }
    Ok(s)
}

/// `X(x)D(f)`: the sign mask first, then the permutation.
pub fn apply_u(u: &PlayerInput, s: StateVector) -> Result<StateVector> {
    let s = apply_diag(&u.f, s)?;
    apply_x(u.x, s)
}

pub fn apply_hadamard(qubit: u32, mut s: StateVector) -> Result<StateVector> {
    if qubit >= s.m {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            qubits: s.m,
        });
    }
    let stride = 1usize << qubit;
    for k in 0..s.amplitudes.len() {
        if k & stride == 0 {
            let a = s.amplitudes[k];
            let b = s.amplitudes[k | stride];
            s.amplitudes[k] = (a + b) * FRAC_1_SQRT_2;
            s.amplitudes[k | stride] = (a - b) * FRAC_1_SQRT_2;
        }
    }
    Ok(s)
}

/// Controlled-NOT between two distinct qubits.
pub fn apply_cnot(control: u32, target: u32, mut s: StateVector) -> Result<StateVector> {
    for q in [control, target] {
        if q >= s.m {
            return Err(Error::QubitOutOfRange {
                index: q,
                qubits: s.m,
            });
        }
    }
    if control == target {
        return Err(Error::Contract("control and target must differ"));
    }
    let (c, t) = (1usize << control, 1usize << target);
    for k in 0..s.amplitudes.len() {
        if k & c != 0 && k & t == 0 {
            s.amplitudes.swap(k, k | t);
        }
    }
    Ok(s)
}

/// Dense square matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Contract("entry count must be dim * dim"));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Contract("matrix dimensions differ"));
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out.entries[i * d + j] += a * other.entries[k * d + j];
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out
    }

    pub fn mul_vec(&self, s: &StateVector) -> Result<StateVector> {
        if s.amplitudes.len() != self.dim {
            return Err(Error::Contract("matrix and state dimensions differ"));
        }
        let d = self.dim;
        let amplitudes = (0..d)
            .map(|i| {
                self.entries[i * d..(i + 1) * d]
                    .iter()
                    .zip(&s.amplitudes)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ok(StateVector { m: s.m, amplitudes })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `M M^dagger = I` within `tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        match self.mul(&self.adjoint()) {
            Ok(p) => p.max_abs_diff(&Self::identity(self.dim)) <= tol,
            Err(_) => false,
        }
    }
}

/// Dense matrix of `X(x)D(f)`: entry `(x ^ z, z)` is `(-1)^f(z)`.
pub fn dense_matrix(u: &PlayerInput) -> DenseMatrix {
    let dim = u.f.len();
    let mut m = DenseMatrix::zeros(dim);
    for z in 0..dim {
        let sign = if u.f.get(z) { -1.0 } else { 1.0 };
        m.set(u.x.index() ^ z, z, Complex64::new(sign, 0.0));
    }
    m
}

/// Anything that acts unitarily on a state vector of fixed width.
pub trait Operator {
    fn qubits(&self) -> u32;
    fn apply(&self, s: StateVector) -> Result<StateVector>;
}

impl Operator for PlayerInput {
    fn qubits(&self) -> u32 {
        self.arity()
    }

    fn apply(&self, s: StateVector) -> Result<StateVector> {
        apply_u(self, s)
    }
}

impl Operator for DenseMatrix {
    fn qubits(&self) -> u32 {
        self.dim.trailing_zeros()
    }

    fn apply(&self, s: StateVector) -> Result<StateVector> {
        self.mul_vec(&s)
    }
}
