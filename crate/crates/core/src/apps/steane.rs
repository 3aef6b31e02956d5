//! The `[[7, 1, 3]]` Steane code and encoded teleportation through noisy pairs.

use crate::error::{Error, Result};
use crate::stats::BellDiagonalInput;

/// Number of physical qubits in the code block.
pub const BLOCK: usize = 7;

/// Stabilizers, lookup decoder and logical operators of the Steane code.
///
/// Both check types share the Hamming parity checks, whose column `q` is the
/// binary expansion of `q + 1`. Pauli words use the `[x | z]` layout on 7 qubits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SteaneFixture {
    /// Parity-check rows as 7-bit qubit masks.
    pub checks: [u32; 3],
    /// `lookup[sx | sz << 3]` is the correction for X syndrome `sx` (from Z checks)
    /// and Z syndrome `sz` (from X checks), as an `[x | z]` word.
    pub lookup: [u32; 64],
    /// Logical X and Z representatives.
    pub logical_x: u32,
    pub logical_z: u32,
}

impl Default for SteaneFixture {
    fn default() -> Self {
        Self::new()
    }
}

impl SteaneFixture {
    pub fn new() -> Self {
        let mut checks = [0u32; 3];
        for (j, row) in checks.iter_mut().enumerate() {
            *row = (0..BLOCK).filter(|q| (q + 1) >> j & 1 == 1).fold(0, |m, q| m | 1 << q);
        }
        // minimum-weight coset leaders: syndrome s points at qubit s - 1
        let leader = |s: u32| if s == 0 { 0 } else { 1u32 << (s - 1) };
        let mut lookup = [0u32; 64];
        for (i, c) in lookup.iter_mut().enumerate() {
            let (sx, sz) = (i as u32 & 7, i as u32 >> 3);
            *c = leader(sx) | leader(sz) << BLOCK;
        }
        let all = (1u32 << BLOCK) - 1;
        SteaneFixture { checks, lookup, logical_x: all, logical_z: all << BLOCK }
    }

    /// Stabilizer generators: three X-type then three Z-type words.
    pub fn stabilizers(&self) -> Vec<u32> {
        self.checks.iter().copied().chain(self.checks.iter().map(|&c| c << BLOCK)).collect()
    }

    fn parity_syndrome(&self, mask: u32) -> u32 {
        self.checks.iter().enumerate().fold(0, |s, (j, &c)| s | ((mask & c).count_ones() & 1) << j)
    }

    /// Six-bit syndrome `sx | sz << 3` of the Pauli error `e`.
    pub fn syndrome(&self, e: u32) -> u32 {
        let mask = (1u32 << BLOCK) - 1;
        self.parity_syndrome(e & mask) | self.parity_syndrome(e >> BLOCK & mask) << 3
    }

    /// Logical action left after decoding `e`: `(x, z)` flips of the encoded qubit.
    pub fn decode(&self, e: u32) -> (bool, bool) {
        let r = e ^ self.lookup[self.syndrome(e) as usize];
        let mask = (1u32 << BLOCK) - 1;
        // X part is detected by logical Z and vice versa
        let x = (r & mask & (self.logical_z >> BLOCK)).count_ones() & 1 == 1;
        let z = (r >> BLOCK & self.logical_x).count_ones() & 1 == 1;
        (x, z)
    }

    /// Whether decoding `e` leaves the logical qubit untouched.
    pub fn corrects(&self, e: u32) -> bool {
        self.decode(e) == (false, false)
    }
}

/// Pauli-frame statistics of the seven pairs used for teleportation.
#[derive(Clone, PartialEq, Debug)]
pub enum PairChannel {
    /// Joint distribution over the `4^7` labels (`x` of pair `q` at bit `q`, `z` at bit `q + 7`).
    Correlated(Vec<f64>),
    /// Independent `(p_I, p_X, p_Y, p_Z)` vectors, one per pair.
    Independent(Vec<[f64; 4]>),
}

/// Logical infidelity of teleporting one half of an encoded Bell pair through
/// seven noisy pairs, decoded with the lookup table.
pub fn teleport_steane(channel: &PairChannel) -> Result<f64> {
    let code = SteaneFixture::new();
    let labels = 1usize << (2 * BLOCK);
    let prob: Box<dyn Fn(u32) -> f64> = match channel {
        PairChannel::Correlated(t) => {
            if t.len() != labels {
                return Err(Error::Dimension(format!("{} table entries, expected {labels}", t.len())));
            }
            if t.iter().any(|&p| !(-1e-12..=1.0 + 1e-12).contains(&p)) || (t.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput("pair table is not a distribution".into()));
            }
            Box::new(move |e| t[e as usize])
        }
        PairChannel::Independent(v) => {
            if v.len() != BLOCK {
                return Err(Error::Dimension(format!("{} pairs, expected {BLOCK}", v.len())));
            }
            let input = BellDiagonalInput::new(v.clone())?;
            Box::new(move |e| input.probability(e))
        }
    };
    let fail: f64 = (0..labels as u32).filter(|&e| !code.corrects(e)).map(&prob).sum();
    Ok(fail)
}
