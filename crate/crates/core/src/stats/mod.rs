//! Exact distillation statistics from coset weight enumerators.
//!
//! Convention: an input error `P` becomes `M P`. The syndrome is the x part of
//! `M P` on the measured qubits `k..n`; the output label is the kept part,
//! packed as `x_keep | z_keep << k`. For syndrome `b` the accepted errors form
//! the coset `M^-1 (P_k + v_b)` and label `L` selects the sub-coset
//! `M^-1 (B_k + v_b + L)`.

pub mod dedup;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{raw_letter_index, raw_weight, PauliVector, MAX_QUBITS};
use crate::symplectic::{SubgroupKind, SubgroupSpec, SymplecticMatrix};

/// Syndrome bits: bit `i` is the parity of measured pair `k + i`.
pub type Syndrome = u32;

/// Largest `n + k` for which all syndromes are enumerated.
pub const MAX_FULL_SIZE: usize = 12;
/// Largest `n + k` for the trivial-syndrome sweep.
pub const MAX_TRIVIAL_SIZE: usize = 24;

/// Counts `E_0..E_n` of coset elements by weight.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct WeightEnumerator(pub Vec<u64>);

impl WeightEnumerator {
    pub fn zeros(n: usize) -> Self {
        WeightEnumerator(vec![0; n + 1])
    }

    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// `sum_w E_w x^(n-w) y^w`.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let n = self.n() as i32;
        self.0.iter().enumerate().map(|(w, &e)| e as f64 * x.powi(n - w as i32) * y.powi(w as i32)).sum()
    }

    /// Total probability of the coset under Werner inputs of fidelity `f`.
    pub fn werner(&self, f: f64) -> f64 {
        self.evaluate(f, (1.0 - f) / 3.0)
    }

    /// Enumerator of the full Pauli group: `3^w C(n, w)`.
    pub fn full_group(n: usize) -> Self {
        WeightEnumerator((0..=n).map(|w| 3u64.pow(w as u32) * binomial(n, w)).collect())
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Product Bell-diagonal input: one `(p_I, p_X, p_Y, p_Z)` vector per pair.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BellDiagonalInput {
    pub pairs: Vec<[f64; 4]>,
}

pub fn werner_coefficients(f: f64) -> [f64; 4] {
    let e = (1.0 - f) / 3.0;
    [f, e, e, e]
}

impl BellDiagonalInput {
    pub fn new(pairs: Vec<[f64; 4]>) -> Result<Self> {
        for (i, p) in pairs.iter().enumerate() {
            if p.iter().any(|&x| !(0.0..=1.0 + 1e-12).contains(&x)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!("pair {i} coefficients {p:?} are not a distribution")));
            }
        }
        Ok(BellDiagonalInput { pairs })
    }

    pub fn werner(n: usize, f: f64) -> Result<Self> {
        Self::new(vec![werner_coefficients(f); n])
    }

    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// Werner fidelity when every pair shares one Werner vector.
    pub fn as_werner(&self) -> Option<f64> {
        let p = self.pairs.first()?;
        let werner = (p[1] - p[2]).abs() < 1e-15 && (p[1] - p[3]).abs() < 1e-15;
        (werner && self.pairs.iter().all(|q| q == p)).then_some(p[0])
    }

    /// Probability of the raw Pauli word `bits`.
    #[inline]
    pub fn probability(&self, bits: u32) -> f64 {
        let n = self.pairs.len();
        (0..n).map(|q| self.pairs[q][raw_letter_index(bits, n, q)]).product()
    }
}

/// Enumerator of `{ M^-1 (u + shift) : u in span(sub) }`.
pub fn coset_weight_enumerator(
    m: &SymplecticMatrix,
    sub: &SubgroupSpec,
    shift: &PauliVector,
) -> Result<WeightEnumerator> {
    let n = m.n();
    if sub.n != n || shift.n() != n {
        return Err(Error::Dimension(format!("matrix on {n} qubits, subgroup on {}, shift on {}", sub.n, shift.n())));
    }
    let inv = m.inverse();
    let gens: Vec<u32> = sub.generators().iter().map(|&g| inv.apply_raw(g)).collect();
    let mut e = WeightEnumerator::zeros(n);
    let mut p = inv.apply_raw(shift.bits());
    e.0[raw_weight(p, n) as usize] += 1;
    for i in 1u64..(1u64 << gens.len()) {
        p ^= gens[i.trailing_zeros() as usize];
        e.0[raw_weight(p, n) as usize] += 1;
    }
    Ok(e)
}

/// Which syndromes a sweep covers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SyndromeMode {
    Trivial,
    All,
}

/// Per-syndrome, per-label numerator enumerators of a protocol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DistillationStatistics {
    pub n: usize,
    pub k: usize,
    /// Syndromes covered, ascending.
    pub syndromes: Vec<Syndrome>,
    /// `counts[((s * 4^k) + label) * (n + 1) + w]`.
    counts: Vec<u64>,
}

/// Coordinates of the coset sweep: position in `v`, contribution to the
/// preimage, to the label and to the syndrome.
struct Coordinate {
    image: u32,
    label: u32,
    syndrome: u32,
}

fn coordinates(m: &SymplecticMatrix, k: usize, mode: SyndromeMode) -> Vec<Coordinate> {
    let n = m.n();
    let inv = m.inverse();
    let mut coords = Vec::with_capacity(2 * n);
    let mut push = |bit: usize, label: u32, syndrome: u32| {
        coords.push(Coordinate { image: inv.columns()[bit], label, syndrome });
    };
    for q in k..n {
        push(q + n, 0, 0);
    }
    for q in 0..k {
        push(q, 1 << q, 0);
    }
    for q in 0..k {
        push(q + n, 1 << (q + k), 0);
    }
    if mode == SyndromeMode::All {
        for q in k..n {
            push(q, 0, 1 << (q - k));
        }
    }
    coords
}

impl DistillationStatistics {
    pub fn labels(&self) -> usize {
        1 << (2 * self.k)
    }

    fn syndrome_index(&self, b: Syndrome) -> Result<usize> {
        match self.syndromes.binary_search(&b) {
            Ok(i) => Ok(i),
            Err(_) => Err(Error::InvalidInput(format!("syndrome {b:#b} not covered by these statistics"))),
        }
    }

    /// Numerator enumerator for syndrome `b` and output label `label`.
    pub fn numerator(&self, b: Syndrome, label: u32) -> Result<WeightEnumerator> {
        let s = self.syndrome_index(b)?;
        if label as usize >= self.labels() {
            return Err(Error::Index(format!("label {label} out of range for k={}", self.k)));
        }
        let w = self.n + 1;
        let off = (s * self.labels() + label as usize) * w;
        Ok(WeightEnumerator(self.counts[off..off + w].to_vec()))
    }

    /// All `4^k` numerators for syndrome `b`, indexed by label.
    pub fn numerator_table(&self, b: Syndrome) -> Result<Vec<Vec<u64>>> {
        let s = self.syndrome_index(b)?;
        let w = self.n + 1;
        let base = s * self.labels() * w;
        Ok((0..self.labels()).map(|l| self.counts[base + l * w..base + (l + 1) * w].to_vec()).collect())
    }

    /// Denominator enumerator (sum over labels) for syndrome `b`.
    pub fn denominator(&self, b: Syndrome) -> Result<WeightEnumerator> {
        let table = self.numerator_table(b)?;
        let mut e = WeightEnumerator::zeros(self.n);
        for row in table {
            for (acc, x) in e.0.iter_mut().zip(row) {
                *acc += x;
            }
        }
        Ok(e)
    }

    /// Evaluate every enumerator at Werner fidelity `f`.
    pub fn werner_table(&self, f: f64) -> OutputTable {
        let w = self.n + 1;
        let y = (1.0 - f) / 3.0;
        let mass = self.counts.chunks(w).map(|c| WeightEnumerator(c.to_vec()).evaluate(f, y)).collect();
        OutputTable { n: self.n, k: self.k, syndromes: self.syndromes.clone(), mass }
    }

    pub fn success_probability_werner(&self, b: Syndrome, f: f64) -> Result<f64> {
        Ok(self.denominator(b)?.werner(f))
    }

    /// Identity-label coefficient of the output state for syndrome `b`.
    pub fn fidelity_werner(&self, b: Syndrome, f: f64) -> Result<f64> {
        let p = self.success_probability_werner(b, f)?;
        if p <= 0.0 {
            return Err(Error::ZeroProbability(b as usize));
        }
        Ok(self.numerator(b, 0)?.werner(f) / p)
    }
}

/// Joint probabilities of (syndrome, output label) for a concrete input.
#[derive(Clone, PartialEq, Debug)]
pub struct OutputTable {
    pub n: usize,
    pub k: usize,
    pub syndromes: Vec<Syndrome>,
    /// `mass[s * 4^k + label]`.
    pub mass: Vec<f64>,
}

impl OutputTable {
    pub fn labels(&self) -> usize {
        1 << (2 * self.k)
    }

    fn row(&self, b: Syndrome) -> Result<&[f64]> {
        let s = self
            .syndromes
            .binary_search(&b)
            .map_err(|_| Error::InvalidInput(format!("syndrome {b:#b} not covered")))?;
        let l = self.labels();
        Ok(&self.mass[s * l..(s + 1) * l])
    }

    pub fn success_probability(&self, b: Syndrome) -> Result<f64> {
        Ok(self.row(b)?.iter().sum())
    }

    /// Normalised output coefficients `F_P^b`, indexed by label.
    pub fn output_coefficients(&self, b: Syndrome) -> Result<Vec<f64>> {
        let row = self.row(b)?;
        let p: f64 = row.iter().sum();
        if p <= 0.0 {
            return Err(Error::ZeroProbability(b as usize));
        }
        Ok(row.iter().map(|x| x / p).collect())
    }

    pub fn output_coefficient(&self, b: Syndrome, label: u32) -> Result<f64> {
        let c = self.output_coefficients(b)?;
        c.get(label as usize).copied().ok_or_else(|| Error::Index(format!("label {label} out of range")))
    }

    pub fn fidelity(&self, b: Syndrome) -> Result<f64> {
        self.output_coefficient(b, 0)
    }

    /// Unnormalised joint probabilities for syndrome `b`.
    pub fn joint(&self, b: Syndrome) -> Result<&[f64]> {
        self.row(b)
    }
}

fn check_size(n: usize, k: usize, mode: SyndromeMode) -> Result<()> {
    if k > n {
        return Err(Error::InvalidInput(format!("k={k} exceeds n={n}")));
    }
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit(format!("{n} qubits exceeds {MAX_QUBITS}")));
    }
    let limit = match mode {
        SyndromeMode::All => MAX_FULL_SIZE,
        SyndromeMode::Trivial => MAX_TRIVIAL_SIZE,
    };
    if n + k > limit {
        return Err(Error::SizeLimit(format!("n + k = {} exceeds {limit} for this syndrome mode", n + k)));
    }
    Ok(())
}

/// All numerator enumerators for every syndrome in `mode`.
pub fn statistics(m: &SymplecticMatrix, k: usize, mode: SyndromeMode) -> Result<DistillationStatistics> {
    let n = m.n();
    check_size(n, k, mode)?;
    let coords = coordinates(m, k, mode);
    let labels = 1usize << (2 * k);
    let syndromes: Vec<Syndrome> = match mode {
        SyndromeMode::All => (0..1u32 << (n - k)).collect(),
        SyndromeMode::Trivial => vec![0],
    };
    let w = n + 1;
    let size = syndromes.len() * labels * w;
    let t = coords.len();
    let split = t.min(6);
    let low = t - split;
    let counts = (0u64..1 << split)
        .into_par_iter()
        .map(|hi| {
            let mut counts = vec![0u64; size];
            let (mut p, mut label, mut syn) = (0u32, 0u32, 0u32);
            for (j, c) in coords[low..].iter().enumerate() {
                if hi >> j & 1 == 1 {
                    p ^= c.image;
                    label ^= c.label;
                    syn ^= c.syndrome;
                }
            }
            let idx = |p: u32, label: u32, syn: u32| ((syn as usize * labels) + label as usize) * w + raw_weight(p, n) as usize;
            counts[idx(p, label, syn)] += 1;
            for i in 1u64..(1u64 << low) {
                let c = &coords[i.trailing_zeros() as usize];
                p ^= c.image;
                label ^= c.label;
                syn ^= c.syndrome;
                counts[idx(p, label, syn)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; size],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(DistillationStatistics { n, k, syndromes, counts })
}

/// Statistics for every syndrome.
pub fn full_statistics(m: &SymplecticMatrix, k: usize) -> Result<DistillationStatistics> {
    statistics(m, k, SyndromeMode::All)
}

/// Statistics for the trivial syndrome only.
pub fn trivial_statistics(m: &SymplecticMatrix, k: usize) -> Result<DistillationStatistics> {
    statistics(m, k, SyndromeMode::Trivial)
}

/// Joint (syndrome, label) probabilities for a product Bell-diagonal input by direct summation.
pub fn bell_diagonal_table(
    m: &SymplecticMatrix,
    k: usize,
    input: &BellDiagonalInput,
    mode: SyndromeMode,
) -> Result<OutputTable> {
    let n = m.n();
    check_size(n, k, mode)?;
    if input.n() != n {
        return Err(Error::Dimension(format!("{} input pairs for {n} qubits", input.n())));
    }
    let coords = coordinates(m, k, mode);
    let labels = 1usize << (2 * k);
    let syndromes: Vec<Syndrome> = match mode {
        SyndromeMode::All => (0..1u32 << (n - k)).collect(),
        SyndromeMode::Trivial => vec![0],
    };
    let mut mass = vec![0.0; syndromes.len() * labels];
    let (mut p, mut label, mut syn) = (0u32, 0u32, 0u32);
    mass[0] += input.probability(0);
    for i in 1u64..(1u64 << coords.len()) {
        let c = &coords[i.trailing_zeros() as usize];
        p ^= c.image;
        label ^= c.label;
        syn ^= c.syndrome;
        mass[syn as usize * labels + label as usize] += input.probability(p);
    }
    Ok(OutputTable { n, k, syndromes, mass })
}

/// Success probability for syndrome `b`; Werner inputs use the enumerator fast path.
pub fn success_probability(m: &SymplecticMatrix, k: usize, b: Syndrome, input: &BellDiagonalInput) -> Result<f64> {
    Ok(syndrome_row(m, k, b, input)?.iter().sum())
}

/// Output coefficient `F_P^b` for label `label`.
pub fn output_coefficient(
    m: &SymplecticMatrix,
    k: usize,
    b: Syndrome,
    label: u32,
    input: &BellDiagonalInput,
) -> Result<f64> {
    let row = syndrome_row(m, k, b, input)?;
    let p: f64 = row.iter().sum();
    if p <= 0.0 {
        return Err(Error::ZeroProbability(b as usize));
    }
    row.get(label as usize).map(|x| x / p).ok_or_else(|| Error::Index(format!("label {label} out of range")))
}

/// Joint probabilities of every label for a single syndrome, from a sweep of its coset.
fn syndrome_row(m: &SymplecticMatrix, k: usize, b: Syndrome, input: &BellDiagonalInput) -> Result<Vec<f64>> {
    let n = m.n();
    check_size(n, k, SyndromeMode::Trivial)?;
    if input.n() != n {
        return Err(Error::Dimension(format!("{} input pairs for {n} qubits", input.n())));
    }
    if (b as u64) >> (n - k) != 0 {
        return Err(Error::Index(format!("syndrome {b:#b} has more than {} bits", n - k)));
    }
    let inv = m.inverse();
    let coords = coordinates(m, k, SyndromeMode::Trivial);
    let labels = 1usize << (2 * k);
    let shift = inv.apply_raw(b << k);
    let werner = input.as_werner();
    if let Some(f) = werner {
        let mut counts = vec![WeightEnumerator::zeros(n); labels];
        let (mut p, mut label) = (shift, 0u32);
        counts[0].0[raw_weight(p, n) as usize] += 1;
        for i in 1u64..(1u64 << coords.len()) {
            let c = &coords[i.trailing_zeros() as usize];
            p ^= c.image;
            label ^= c.label;
            counts[label as usize].0[raw_weight(p, n) as usize] += 1;
        }
        return Ok(counts.iter().map(|e| e.werner(f)).collect());
    }
    let mut row = vec![0.0; labels];
    let (mut p, mut label) = (shift, 0u32);
    row[0] += input.probability(p);
    for i in 1u64..(1u64 << coords.len()) {
        let c = &coords[i.trailing_zeros() as usize];
        p ^= c.image;
        label ^= c.label;
        row[label as usize] += input.probability(p);
    }
    Ok(row)
}

/// Quantum MacWilliams transform: commutant enumerator from the stabilizer enumerator.
pub fn macwilliams_transform(e_b: &WeightEnumerator, n: usize, k: usize) -> Result<WeightEnumerator> {
    if e_b.n() != n || k > n {
        return Err(Error::Dimension(format!("enumerator of length {} for n={n}, k={k}", e_b.0.len())));
    }
    let size = 1i128 << (n - k);
    if e_b.total() as i128 != size {
        return Err(Error::InvalidInput(format!("enumerator sums to {}, expected {size}", e_b.total())));
    }
    let c = |a: usize, b: usize| binomial(a, b) as i128;
    let mut out = Vec::with_capacity(n + 1);
    for w in 0..=n {
        let mut acc: i128 = 0;
        for (wp, &e) in e_b.0.iter().enumerate() {
            let mut kraw: i128 = 0;
            for s in 0..=w {
                let term = 3i128.pow((w - s) as u32) * c(wp, s) * c(n - wp, w - s);
                kraw += if s % 2 == 0 { term } else { -term };
            }
            acc += kraw * e as i128;
        }
        if acc % size != 0 || acc < 0 {
            return Err(Error::InvalidInput(format!("inconsistent enumerator: weight {w} gives {acc}/{size}")));
        }
        out.push((acc / size) as u64);
    }
    Ok(WeightEnumerator(out))
}

/// Largest `d` such that the two enumerators agree below weight `d`.
pub fn code_distance(e_b: &WeightEnumerator, e_p: &WeightEnumerator) -> usize {
    e_b.0.iter().zip(&e_p.0).position(|(a, b)| a != b).unwrap_or(e_b.0.len())
}

/// Coefficient `c` in `F_out = 1 - c (1 - F_in)^d + ...`, i.e. `(B_d - A_d) / 3^d`.
pub fn leading_order_fidelity(e_b: &WeightEnumerator, e_p: &WeightEnumerator, d: usize) -> Result<f64> {
    if d == 0 || d > e_b.n() {
        return Err(Error::InvalidInput(format!("distance {d} outside 1..={}", e_b.n())));
    }
    Ok((e_p.0[d] as f64 - e_b.0[d] as f64) / 3f64.powi(d as i32))
}

/// Stabilizer and commutant enumerators at the trivial syndrome, the latter
/// through the MacWilliams identity.
pub fn code_enumerators(m: &SymplecticMatrix, k: usize) -> Result<(WeightEnumerator, WeightEnumerator)> {
    let n = m.n();
    let sub = SubgroupSpec::new(SubgroupKind::BkSpan, n, k)?;
    let e_b = coset_weight_enumerator(m, &sub, &PauliVector::identity(n)?)?;
    let e_p = macwilliams_transform(&e_b, n, k)?;
    Ok((e_b, e_p))
}

/// Stabilizer of the graph code as raw `[x | z]` words on the outputs
/// (natural output order): `prod_{v in S} K_v` for `S` in the kernel of the
/// codeword matrix.
pub fn graph_code_stabilizer(g: &crate::graph::NKGraph) -> Vec<u32> {
    let outs = g.outputs();
    let n = outs.len();
    let labeling = g.natural_labeling();
    let a = g.codeword_generators(&labeling);
    let gamma = g.output_adjacency(&labeling);
    let kernel = a.kernel();
    let gens: Vec<u32> = kernel
        .iter()
        .map(|&s| {
            let z = (0..n).filter(|&i| (gamma.rows[i] & s).count_ones() % 2 == 1).fold(0u32, |acc, i| acc | 1 << i);
            s | z << n
        })
        .collect();
    let mut out = Vec::with_capacity(1 << gens.len());
    let mut p = 0u32;
    out.push(p);
    for i in 1u64..(1u64 << gens.len()) {
        p ^= gens[i.trailing_zeros() as usize];
        out.push(p);
    }
    out
}

/// Weight enumerator of a list of raw words on `n` qubits.
pub fn enumerate_weights(words: &[u32], n: usize) -> WeightEnumerator {
    let mut e = WeightEnumerator::zeros(n);
    for &w in words {
        e.0[(raw_weight(w, n)) as usize] += 1;
    }
    e
}

/// Trivial-syndrome Werner fidelity of a graph code from its stabilizer alone.
pub fn graph_code_fidelity(g: &crate::graph::NKGraph, f: f64) -> Result<(f64, f64)> {
    let (n, k) = (g.n_out(), g.k_in());
    if !g.is_valid_code() {
        return Err(Error::InvalidCode("codeword generators are dependent".into()));
    }
    let e_b = enumerate_weights(&graph_code_stabilizer(g), n);
    let e_p = macwilliams_transform(&e_b, n, k)?;
    let p = e_p.werner(f);
    Ok((p, e_b.werner(f) / p))
}
