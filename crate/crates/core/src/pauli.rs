//! Phaseless Pauli strings as vectors in GF(2)^{2n}.
//!
//! Layout is `[x | z]`: qubit `i` (0-based) owns bit `i` of the x part and
//! bit `i + n` of the z part. Phases are dropped everywhere.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported qubit count.
pub const MAX_QUBITS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PauliVector {
    n: usize,
    bits: u32,
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// `(x, z)` bits of the letter.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Index into a `(p_I, p_X, p_Y, p_Z)` coefficient vector.
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[inline]
pub(crate) fn mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Weight of a raw `[x | z]` word on `n` qubits.
#[inline]
pub fn raw_weight(bits: u32, n: usize) -> u32 {
    ((bits | (bits >> n)) & mask(n)).count_ones()
}

/// Symplectic form of two raw words on `n` qubits.
#[inline]
pub fn raw_form(v: u32, w: u32, n: usize) -> u32 {
    let m = mask(n);
    (((v & m) & (w >> n)) ^ ((v >> n) & (w & m))).count_ones() & 1
}

/// Index `(p_I, p_X, p_Y, p_Z)` of qubit `q` in a raw word.
#[inline]
pub(crate) fn raw_letter_index(bits: u32, n: usize, q: usize) -> usize {
    let x = (bits >> q) & 1;
    let z = (bits >> (q + n)) & 1;
    match (x, z) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

impl PauliVector {
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_bits(n, 0)
    }

    pub fn from_bits(n: usize, bits: u32) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        if n < 16 && bits >> (2 * n) != 0 {
            return Err(Error::Dimension(format!("bits {bits:#x} do not fit {n} qubits")));
        }
        Ok(PauliVector { n, bits })
    }

    pub fn from_parts(n: usize, x: u32, z: u32) -> Result<Self> {
        if (x | z) & !mask(n) != 0 {
            return Err(Error::Dimension(format!("parts do not fit {n} qubits")));
        }
        Self::from_bits(n, x | (z << n))
    }

    /// Parse a string such as `"IXYZ"`; character `i` is qubit `i`.
    pub fn parse(s: &str) -> Result<Self> {
        let n = s.chars().count();
        let mut x = 0u32;
        let mut z = 0u32;
        for (i, c) in s.chars().enumerate() {
            let (bx, bz) = match c.to_ascii_uppercase() {
                'I' => (false, false),
                'X' => (true, false),
                'Y' => (true, true),
                'Z' => (false, true),
                other => return Err(Error::Parse(format!("unknown Pauli letter {other:?}"))),
            };
            x |= (bx as u32) << i;
            z |= (bz as u32) << i;
        }
        Self::from_parts(n, x, z)
    }

    /// The Pauli with a single letter `p` on qubit `q`.
    pub fn single(n: usize, q: usize, p: Pauli) -> Result<Self> {
        if q >= n {
            return Err(Error::Index(format!("qubit {q} out of range for n={n}")));
        }
        let (x, z) = p.bits();
        Self::from_parts(n, (x as u32) << q, (z as u32) << q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn x_part(&self) -> u32 {
        self.bits & mask(self.n)
    }

    pub fn z_part(&self) -> u32 {
        (self.bits >> self.n) & mask(self.n)
    }

    pub fn letter(&self, q: usize) -> Pauli {
        Pauli::from_bits((self.x_part() >> q) & 1 == 1, (self.z_part() >> q) & 1 == 1)
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        raw_weight(self.bits, self.n) as usize
    }

    /// Pauli multiplication modulo phase.
    pub fn add(&self, other: &PauliVector) -> Result<PauliVector> {
        self.check(other)?;
        Ok(PauliVector { n: self.n, bits: self.bits ^ other.bits })
    }

    fn check(&self, other: &PauliVector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(())
    }
}

/// `x_v . z_w + z_v . x_w mod 2`; zero iff the two strings commute.
pub fn symplectic_form(v: &PauliVector, w: &PauliVector) -> Result<u8> {
    v.check(w)?;
    Ok(raw_form(v.bits, w.bits, v.n) as u8)
}

/// Number of non-identity tensor factors of `v`.
pub fn weight(v: &PauliVector) -> usize {
    v.weight()
}

impl fmt::Display for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).letter())?;
        }
        Ok(())
    }
}

/// Label string of a k-qubit Pauli encoded as `[x | z]` in `bits`.
pub fn label_string(bits: u32, k: usize) -> String {
    (0..k)
        .map(|q| Pauli::from_bits((bits >> q) & 1 == 1, (bits >> (q + k)) & 1 == 1).letter())
        .collect()
}
