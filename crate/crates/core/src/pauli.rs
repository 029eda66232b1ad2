//! Phase-tracked Pauli operators in binary symplectic form.
//!
//! An operator is stored as `i^phase · X^x · Z^z` (all X factors to the left
//! of all Z factors), so the Hermitian `Y` on one qubit is `x = z = 1` with
//! one unit of phase. Text forms follow the usual listing convention: one
//! letter per qubit, Alice's block, a `|`, then Bob's block. Letters carry no
//! sign; [`PauliOperator::signed_string`] exposes the tracked phase.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// Split of the physical qubits between Alice (`n`) and Bob (`c` ebit halves).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitLayout {
    pub n: usize,
    pub c: usize,
}

impl QubitLayout {
    pub fn new(n: usize, c: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidLayout {
                n,
                c,
                reason: "need at least one Alice qubit".into(),
            });
        }
        if c > n {
            return Err(Error::InvalidLayout {
                n,
                c,
                reason: "more ebits than Alice qubits".into(),
            });
        }
        Ok(QubitLayout { n, c })
    }

    pub fn total(&self) -> usize {
        self.n + self.c
    }

    /// Number of ancilla qubits, `n - c`.
    pub fn ancillas(&self) -> usize {
        self.n - self.c
    }

    /// Global index of Bob's `j`-th qubit (0-based).
    pub fn bob(&self, j: usize) -> usize {
        assert!(j < self.c);
        self.n + j
    }

    /// Global index of the Alice half of ebit `j` (0-based).
    pub fn ebit_alice(&self, j: usize) -> usize {
        assert!(j < self.c);
        self.n - self.c + j
    }

    pub fn is_bob(&self, pos: usize) -> bool {
        pos >= self.n
    }

    fn check(&self, other: &QubitLayout) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::LayoutMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for QubitLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} c={}", self.n, self.c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    x: BitVec,
    z: BitVec,
    /// Power of `i`, always in `0..4`.
    phase: u8,
    layout: QubitLayout,
}

impl PauliOperator {
    pub fn identity(layout: QubitLayout) -> Self {
        PauliOperator {
            x: BitVec::zeros(layout.total()),
            z: BitVec::zeros(layout.total()),
            phase: 0,
            layout,
        }
    }

    /// `i^phase · X^x · Z^z`.
    pub fn from_parts(layout: QubitLayout, x: BitVec, z: BitVec, phase: u8) -> Result<Self> {
        for v in [&x, &z] {
            if v.len() != layout.total() {
                return Err(Error::LengthMismatch {
                    expected: layout.total(),
                    found: v.len(),
                });
            }
        }
        Ok(PauliOperator {
            x,
            z,
            phase: phase % 4,
            layout,
        })
    }

    /// Hermitian single-qubit Pauli at global position `pos`.
    pub fn single(layout: QubitLayout, pos: usize, p: Pauli) -> Self {
        let mut op = Self::identity(layout);
        op.set(pos, p);
        op
    }

    /// `Z^bits` with phase 0.
    pub fn z_type(layout: QubitLayout, bits: BitVec) -> Result<Self> {
        Self::from_parts(layout, BitVec::zeros(layout.total()), bits, 0)
    }

    pub fn x_type(layout: QubitLayout, bits: BitVec) -> Result<Self> {
        Self::from_parts(layout, bits, BitVec::zeros(layout.total()), 0)
    }

    /// Replaces the tensor factor at `pos` by the Hermitian Pauli `p`,
    /// keeping the sign of the remaining factors.
    pub fn set(&mut self, pos: usize, p: Pauli) {
        if self.get(pos) == Pauli::Y {
            self.phase = (self.phase + 3) % 4;
        }
        let (x, z) = p.bits();
        self.x.set(pos, x);
        self.z.set(pos, z);
        if p == Pauli::Y {
            self.phase = (self.phase + 1) % 4;
        }
    }

    pub fn get(&self, pos: usize) -> Pauli {
        Pauli::from_bits(self.x.get(pos), self.z.get(pos))
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn layout(&self) -> QubitLayout {
        self.layout
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total()
    }

    pub fn weight(&self) -> usize {
        self.x.xor(&self.z).count_ones() + self.x.and(&self.z).count_ones()
    }

    /// Identity up to global phase.
    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn bob_is_identity(&self) -> bool {
        let n = self.layout.n;
        !self.x.iter_ones().any(|i| i >= n) && !self.z.iter_ones().any(|i| i >= n)
    }

    pub fn alice_is_identity(&self) -> bool {
        let n = self.layout.n;
        !self.x.iter_ones().any(|i| i < n) && !self.z.iter_ones().any(|i| i < n)
    }

    pub fn eq_mod_phase(&self, other: &Self) -> bool {
        self.layout == other.layout && self.x == other.x && self.z == other.z
    }

    /// Group product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.layout.check(&other.layout)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    /// `self ← self · other`; layouts must agree.
    pub(crate) fn mul_assign_unchecked(&mut self, other: &Self) {
        // Z^z1 X^x2 = (-1)^{z1·x2} X^x2 Z^z1
        let swap = if self.z.dot(&other.x) { 2 } else { 0 };
        self.phase = (self.phase + other.phase + swap) % 4;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.layout.check(&other.layout)?;
        Ok(self.x.dot(&other.z) == self.z.dot(&other.x))
    }

    /// Multiplies the operator by `i^k`.
    pub fn with_phase_shift(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    /// Phase change accumulated by conjugating with the Hadamard on `q`.
    pub(crate) fn conjugate_h(&mut self, q: usize) {
        let (x, z) = (self.x.get(q), self.z.get(q));
        if x && z {
            self.phase = (self.phase + 2) % 4;
        }
        self.x.set(q, z);
        self.z.set(q, x);
    }

    pub(crate) fn conjugate_cz(&mut self, a: usize, b: usize) {
        let (xa, xb) = (self.x.get(a), self.x.get(b));
        if xa && xb {
            self.phase = (self.phase + 2) % 4;
        }
        if xb {
            self.z.flip(a);
        }
        if xa {
            self.z.flip(b);
        }
    }

    /// Sign of the operator relative to its unsigned letter string, as a power of `i`.
    pub fn letter_phase(&self) -> u8 {
        let ys = (self.x.and(&self.z).count_ones() % 4) as u8;
        (self.phase + 4 - ys) % 4
    }

    /// Letter string prefixed by `+`, `+i`, `-` or `-i`.
    pub fn signed_string(&self) -> String {
        let prefix = ["+", "+i", "-", "-i"][self.letter_phase() as usize];
        format!("{prefix}{self}")
    }

    /// Parses a string in the `|`-separated grammar, checking it against `layout`.
    pub fn parse_in(s: &str, layout: QubitLayout) -> Result<Self> {
        let op: PauliOperator = s.parse()?;
        if op.layout != layout {
            return Err(Error::parse(
                s,
                format!("expected layout {layout}, found {}", op.layout),
            ));
        }
        Ok(op)
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (sign, body) = if let Some(rest) = t.strip_prefix("+i").or_else(|| t.strip_prefix('i')) {
            (1u8, rest)
        } else if let Some(rest) = t.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = t.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = t.strip_prefix('+') {
            (0, rest)
        } else {
            (0, t)
        };
        let Some((alice, bob)) = body.split_once('|') else {
            return Err(Error::parse(s, "missing '|' between Alice and Bob blocks"));
        };
        if bob.contains('|') {
            return Err(Error::parse(s, "more than one '|'"));
        }
        let letters: Vec<Pauli> = alice
            .chars()
            .chain(bob.chars())
            .map(|ch| Pauli::from_char(ch).ok_or_else(|| Error::parse(s, format!("bad character {ch:?}"))))
            .collect::<Result<_>>()?;
        let n = alice.chars().count();
        let c = bob.chars().count();
        let layout = QubitLayout::new(n, c).map_err(|e| Error::parse(s, e.to_string()))?;
        let mut op = PauliOperator::identity(layout);
        for (i, p) in letters.into_iter().enumerate() {
            op.set(i, p);
        }
        Ok(op.with_phase_shift(sign))
    }
}

/// Unsigned letters (operators are reported modulo global phase).
impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(self.num_qubits() + 1);
        for i in 0..self.num_qubits() {
            if i == self.layout.n {
                s.push('|');
            }
            s.push(self.get(i).as_char());
        }
        if self.layout.c == 0 {
            s.push('|');
        }
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.signed_string())
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Free-function form of [`PauliOperator::mul`].
pub fn pauli_mul(a: &PauliOperator, b: &PauliOperator) -> Result<PauliOperator> {
    a.mul(b)
}

/// Free-function form of [`PauliOperator::commutes`].
pub fn commutes(a: &PauliOperator, b: &PauliOperator) -> Result<bool> {
    a.commutes(b)
}
