//! Symplectic matrices over GF(2), gate generators and the `P_k` / `B_k` subgroups.
//!
//! A matrix acts on column vectors in the `[x | z]` layout of [`crate::pauli`].
//! Column `j` stores the image of basis vector `e_j`, so conjugating a Pauli
//! through a circuit is a sequence of XORs of stored columns.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::pauli::{mask, raw_form, PauliVector, MAX_QUBITS};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymplecticMatrix {
    n: usize,
    cols: Vec<u32>,
}

/// Clifford generators, 0-based qubit indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    /// The gate undoing this one (all generators here are involutions except S).
    pub fn inverse(&self) -> Vec<Gate> {
        match *self {
            Gate::S(q) => vec![Gate::S(q), Gate::S(q), Gate::S(q)],
            g => vec![g],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(Error::Index(format!("qubit {q} out of range for n={n}")));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Index(format!("two-qubit gate on a single qubit {}", qs[0])));
        }
        Ok(())
    }
}

/// Conjugate the raw `[x | z]` word `v` by `gate`.
#[inline]
pub fn apply_gate_raw(v: u32, gate: Gate, n: usize) -> u32 {
    let bit = |v: u32, i: usize| (v >> i) & 1;
    match gate {
        Gate::H(q) => {
            let x = bit(v, q);
            let z = bit(v, q + n);
            (v & !((1 << q) | (1 << (q + n)))) | (z << q) | (x << (q + n))
        }
        Gate::S(q) => v ^ (bit(v, q) << (q + n)),
        Gate::Cnot { control, target } => {
            let v = v ^ (bit(v, control) << target);
            v ^ (bit(v, target + n) << (control + n))
        }
        Gate::Cz(a, b) => {
            let xa = bit(v, a);
            let xb = bit(v, b);
            v ^ (xa << (b + n)) ^ (xb << (a + n))
        }
    }
}

impl SymplecticMatrix {
    pub fn identity(n: usize) -> Self {
        SymplecticMatrix { n, cols: (0..2 * n).map(|j| 1u32 << j).collect() }
    }

    /// Build from columns, checking the symplectic condition.
    pub fn from_columns(n: usize, cols: Vec<u32>) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::SizeLimit(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        if cols.len() != 2 * n {
            return Err(Error::Dimension(format!("expected {} columns, got {}", 2 * n, cols.len())));
        }
        let m = SymplecticMatrix { n, cols };
        if !m.check_form() {
            return Err(Error::NotSymplectic);
        }
        Ok(m)
    }

    /// Build from a `2n x 2n` row-major bit matrix.
    pub fn from_bit_matrix(m: &BitMatrix) -> Result<Self> {
        if !is_symplectic(m)? {
            return Err(Error::NotSymplectic);
        }
        let n = m.cols / 2;
        Ok(SymplecticMatrix { n, cols: m.transpose().rows })
    }

    pub fn to_bit_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(2 * self.n, self.cols.clone()).transpose()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[u32] {
        &self.cols
    }

    #[inline]
    pub fn apply_raw(&self, v: u32) -> u32 {
        let mut acc = 0;
        let mut bits = v;
        while bits != 0 {
            let j = bits.trailing_zeros() as usize;
            acc ^= self.cols[j];
            bits &= bits - 1;
        }
        acc
    }

    pub fn apply(&self, v: &PauliVector) -> Result<PauliVector> {
        if v.n() != self.n {
            return Err(Error::Dimension(format!("{}-qubit vector, {}-qubit matrix", v.n(), self.n)));
        }
        PauliVector::from_bits(self.n, self.apply_raw(v.bits()))
    }

    /// Matrix product `self * other` (apply `other` first).
    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        SymplecticMatrix { n: self.n, cols: other.cols.iter().map(|&c| self.apply_raw(c)).collect() }
    }

    /// Left-multiply by a gate generator.
    pub fn then_gate(&self, gate: Gate) -> SymplecticMatrix {
        SymplecticMatrix {
            n: self.n,
            cols: self.cols.iter().map(|&c| apply_gate_raw(c, gate, self.n)).collect(),
        }
    }

    pub fn transpose(&self) -> SymplecticMatrix {
        let t = BitMatrix::from_rows(2 * self.n, self.cols.clone()).transpose();
        SymplecticMatrix { n: self.n, cols: t.rows }
    }

    /// `Omega M^T Omega`, the inverse of a symplectic matrix.
    pub fn inverse(&self) -> SymplecticMatrix {
        let n = self.n;
        let swap = |v: u32| ((v & mask(n)) << n) | ((v >> n) & mask(n));
        // column j of Omega M^T Omega = Omega (row sigma(j) of M)
        let rows = self.to_bit_matrix().rows;
        let cols = (0..2 * n)
            .map(|j| {
                let sj = if j < n { j + n } else { j - n };
                swap(rows[sj])
            })
            .collect();
        SymplecticMatrix { n, cols }
    }

    fn check_form(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (i..2 * n).all(|j| {
                let expected = u32::from(i + n == j);
                raw_form(self.cols[i], self.cols[j], n) == expected
            })
        })
    }

    pub fn is_symplectic(&self) -> bool {
        self.check_form()
    }
}

/// True iff `M^T Omega M = Omega`.
pub fn is_symplectic(m: &BitMatrix) -> Result<bool> {
    if m.cols != m.nrows() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", m.nrows(), m.cols)));
    }
    if m.cols % 2 == 1 {
        return Err(Error::Dimension(format!("odd dimension {}", m.cols)));
    }
    let n = m.cols / 2;
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit(format!("{n} qubits exceeds {MAX_QUBITS}")));
    }
    Ok(SymplecticMatrix { n, cols: m.transpose().rows }.check_form())
}

/// Inverse of a symplectic matrix.
pub fn invert(m: &SymplecticMatrix) -> Result<SymplecticMatrix> {
    if !m.is_symplectic() {
        return Err(Error::NotSymplectic);
    }
    Ok(m.inverse())
}

/// Symplectic matrix of conjugation by a single gate.
pub fn gate_generator(gate: Gate, n: usize) -> Result<SymplecticMatrix> {
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit(format!("{n} qubits exceeds {MAX_QUBITS}")));
    }
    gate.validate(n)?;
    Ok(SymplecticMatrix::identity(n).then_gate(gate))
}

/// Ordered product of gate generators: the last gate ends up leftmost.
pub fn gates_to_symplectic(gates: &[Gate], n: usize) -> Result<SymplecticMatrix> {
    let mut m = SymplecticMatrix::identity(n);
    for &g in gates {
        g.validate(n)?;
        m = m.then_gate(g);
    }
    Ok(m)
}

/// A random symplectic matrix built from a long product of random generators.
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymplecticMatrix {
    let mut m = SymplecticMatrix::identity(n);
    let steps = 8 * n * n + 8;
    for _ in 0..steps {
        let g = match rng.random_range(0..4) {
            0 => Gate::H(rng.random_range(0..n)),
            1 => Gate::S(rng.random_range(0..n)),
            _ if n >= 2 => {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                if rng.random_bool(0.5) {
                    Gate::Cnot { control: a, target: b }
                } else {
                    Gate::Cz(a, b)
                }
            }
            _ => Gate::H(0),
        };
        m = m.then_gate(g);
    }
    m
}

/// Which matrix [`build_from_graph`] returns.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphMatrixForm {
    /// Action of the synthesized circuit `H_meas * CNOT-block * CZ-block` on errors.
    Circuit,
    /// `[[A, A Gamma], [0, A^T]]`: the circuit conjugated by Hadamards on every qubit.
    Block,
    /// [`GraphMatrixForm::Block`] left-multiplied by a keep-only Clifford so that
    /// the keep-keep block `Q` vanishes.
    Normalized,
}

/// `A = [[I_k, 0], [T, I_{n-k}]]` as row-major `n x n` rows, `T` being `(n-k) x k`.
pub(crate) fn block_a(n: usize, k: usize, t: &BitMatrix) -> BitMatrix {
    let rows = (0..n).map(|i| if i < k { 1u32 << i } else { t.rows[i - k] | 1 << i }).collect();
    BitMatrix::from_rows(n, rows)
}

/// Assemble `[[A, B], [0, A^T]]` from row-major blocks.
pub(crate) fn upper_block(n: usize, a: &BitMatrix, b: &BitMatrix) -> SymplecticMatrix {
    let at = a.transpose();
    let rows: Vec<u32> = (0..n).map(|i| a.rows[i] | b.rows[i] << n).chain((0..n).map(|i| at.rows[i] << n)).collect();
    let m = BitMatrix::from_rows(2 * n, rows);
    SymplecticMatrix { n, cols: m.transpose().rows }
}

/// Symplectic matrix of the protocol defined by an `(n, k)`-graph and a valid labeling.
///
/// Qubit `p` of the matrix is output vertex `labeling.output_order[p]`.
pub fn build_from_graph(
    g: &crate::graph::NKGraph,
    labeling: &crate::graph::Labeling,
    form: GraphMatrixForm,
) -> Result<SymplecticMatrix> {
    let (n, k) = (g.n_out(), g.k_in());
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit(format!("{n} qubits exceeds {MAX_QUBITS}")));
    }
    let rt = g.reduced_codewords(labeling)?;
    let t = rt.transpose();
    let t = BitMatrix::from_rows(k, if n == k { vec![] } else { t.rows });
    let a = block_a(n, k, &t);
    let mut gamma = g.output_adjacency(labeling);
    match form {
        GraphMatrixForm::Circuit => {
            let ag = a.mul(&gamma);
            let at = a.transpose();
            let rows: Vec<u32> =
                (0..n).map(|i| at.rows[i]).chain((0..n).map(|i| ag.rows[i] | a.rows[i] << n)).collect();
            let cols = BitMatrix::from_rows(2 * n, rows).transpose().rows;
            let mut m = SymplecticMatrix { n, cols };
            for q in k..n {
                m = m.then_gate(Gate::H(q));
            }
            Ok(m)
        }
        GraphMatrixForm::Block => Ok(upper_block(n, &a, &a.mul(&gamma))),
        GraphMatrixForm::Normalized => {
            // drop Q: R -> R + T Q, S -> S + T Q T^T
            let q = BitMatrix::from_rows(k, gamma.rows[..k].iter().map(|&r| r & mask(k)).collect());
            let tq = t.mul(&q);
            let tqt = tq.mul(&t.transpose());
            for i in 0..k {
                gamma.rows[i] &= !mask(k);
            }
            for a_ in 0..n - k {
                let extra = tq.rows[a_];
                gamma.rows[k + a_] ^= extra | tqt.rows[a_] << k;
                for j in 0..k {
                    if extra >> j & 1 == 1 {
                        gamma.rows[j] ^= 1 << (k + a_);
                    }
                }
            }
            Ok(upper_block(n, &a, &a.mul(&gamma)))
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SubgroupKind {
    /// Arbitrary on qubits `0..k`, `I`/`Z` on `k..n`.
    PkSpan,
    /// `Z`-strings on `k..n`.
    BkSpan,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SubgroupSpec {
    pub kind: SubgroupKind,
    pub n: usize,
    pub k: usize,
}

impl SubgroupSpec {
    pub fn new(kind: SubgroupKind, n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidInput(format!("k={k} exceeds n={n}")));
        }
        Ok(SubgroupSpec { kind, n, k })
    }

    /// Generators as raw words.
    pub fn generators(&self) -> Vec<u32> {
        let (n, k) = (self.n, self.k);
        let mut gens: Vec<u32> = (k..n).map(|q| 1u32 << (q + n)).collect();
        if self.kind == SubgroupKind::PkSpan {
            gens.extend((0..k).map(|q| 1u32 << q));
            gens.extend((0..k).map(|q| 1u32 << (q + n)));
        }
        gens
    }

    pub fn size(&self) -> u64 {
        1u64 << self.generators().len()
    }
}
