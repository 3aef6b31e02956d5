//! Exact simulation of distillation circuits on Bell-diagonal states.
//!
//! A state of `m` pairs is a probability vector over joint Bell labels, using
//! the `[x | z]` word layout of [`crate::pauli`]: pair `q` is `Φ⁺` for
//! `(0,0)`, `Ψ⁺` for `(1,0)`, `Φ⁻` for `(0,1)` and `Ψ⁻` for `(1,1)`. Bilateral
//! Clifford gates permute labels; two-pair gate noise mixes the acted-on pairs
//! towards uniform; a Z measurement on both sides reveals the `x` bit.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitGate};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::stats::{BellDiagonalInput, OutputTable, Syndrome};
use crate::symplectic::{apply_gate_raw, Gate};

/// Largest number of pairs the simulator accepts.
pub const MAX_PAIRS: usize = 12;

/// How a measurement error acts on the coincidence bit.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize, clap::ValueEnum)]
pub enum MeasurementNoise {
    /// The parity bit is flipped with probability `p_m`.
    #[default]
    Coincidence,
    /// Each party's outcome flips independently, so the parity flips with `2 p_m (1 - p_m)`.
    PerParty,
}

#[derive(Clone, Copy, PartialEq, Debug, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability of every two-pair gate.
    pub p_gate: f64,
    /// Measurement error probability.
    pub p_meas: f64,
    pub measurement: MeasurementNoise,
}

impl NoiseModel {
    pub fn new(p_gate: f64, p_meas: f64) -> Result<Self> {
        for (name, p) in [("p_gate", p_gate), ("p_meas", p_meas)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(NoiseModel { p_gate, p_meas, measurement: MeasurementNoise::Coincidence })
    }

    pub fn noiseless() -> Self {
        NoiseModel::default()
    }

    pub fn with_measurement(self, measurement: MeasurementNoise) -> Self {
        NoiseModel { measurement, ..self }
    }

    /// Probability that a reported parity bit is wrong.
    pub fn parity_flip(&self) -> f64 {
        match self.measurement {
            MeasurementNoise::Coincidence => self.p_meas,
            MeasurementNoise::PerParty => 2.0 * self.p_meas * (1.0 - self.p_meas),
        }
    }
}

/// Bilateral two-pair gates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BilateralGate {
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

/// Joint Bell-diagonal distribution over the pairs still present.
#[derive(Clone, PartialEq, Debug)]
pub struct BellDiagonalState {
    /// Original pair index of each active position.
    pairs: Vec<usize>,
    probs: Vec<f64>,
}

/// One outcome of a pair measurement.
#[derive(Clone, PartialEq, Debug)]
pub struct Branch {
    pub bit: u8,
    pub probability: f64,
    /// Posterior over the remaining pairs; `None` when the branch is impossible.
    pub state: Option<BellDiagonalState>,
}

impl BellDiagonalState {
    pub fn from_input(input: &BellDiagonalInput) -> Result<Self> {
        let m = input.n();
        if m > MAX_PAIRS {
            return Err(Error::SizeLimit(format!("{m} pairs exceeds {MAX_PAIRS}")));
        }
        let probs = (0..1u32 << (2 * m)).map(|l| input.probability(l)).collect();
        Ok(BellDiagonalState { pairs: (0..m).collect(), probs })
    }

    pub fn from_probabilities(probs: Vec<f64>) -> Result<Self> {
        let m = (probs.len().trailing_zeros() / 2) as usize;
        if probs.len() != 1 << (2 * m) || m > MAX_PAIRS {
            return Err(Error::Dimension(format!("{} entries is not 4^m with m <= {MAX_PAIRS}", probs.len())));
        }
        if probs.iter().any(|&p| p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput("probabilities must be non-negative and sum to 1".into()));
        }
        Ok(BellDiagonalState { pairs: (0..m).collect(), probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        let len = 1usize << (2 * m);
        Self::from_probabilities(vec![1.0 / len as f64; len])
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Original indices of the pairs still present.
    pub fn pairs(&self) -> &[usize] {
        &self.pairs
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Probability that every pair is `Φ⁺`.
    pub fn fidelity(&self) -> f64 {
        self.probs[0]
    }

    fn position(&self, pair: usize) -> Result<usize> {
        self.pairs
            .iter()
            .position(|&p| p == pair)
            .ok_or_else(|| Error::Index(format!("pair {pair} is not present (measured or out of range)")))
    }

    fn permute(&mut self, gate: Gate) {
        let m = self.num_pairs();
        let mut out = vec![0.0; self.probs.len()];
        for (l, &p) in self.probs.iter().enumerate() {
            out[apply_gate_raw(l as u32, gate, m) as usize] = p;
        }
        self.probs = out;
    }

    /// Replace the pairs at positions `i`, `j` by uniform noise with probability `p`,
    /// keeping their joint marginal with the other pairs.
    fn depolarize(&mut self, i: usize, j: usize, p: f64) {
        if p == 0.0 {
            return;
        }
        let m = self.num_pairs();
        let bits = [i, i + m, j, j + m];
        let mask: usize = bits.iter().map(|&b| 1usize << b).sum();
        let spread = |s: usize| bits.iter().enumerate().fold(0usize, |acc, (t, &b)| acc | ((s >> t) & 1) << b);
        for base in 0..self.probs.len() {
            if base & mask != 0 {
                continue;
            }
            let total: f64 = (0..16).map(|s| self.probs[base | spread(s)]).sum();
            for s in 0..16 {
                let l = base | spread(s);
                self.probs[l] = (1.0 - p) * self.probs[l] + p * total / 16.0;
            }
        }
    }

    pub fn apply_bilateral_gate(&self, gate: BilateralGate, noise: &NoiseModel) -> Result<Self> {
        let (a, b) = match gate {
            BilateralGate::Cnot { control, target } => (control, target),
            BilateralGate::Cz(a, b) => (a, b),
        };
        if a == b {
            return Err(Error::Index(format!("two-pair gate on a single pair {a}")));
        }
        let (i, j) = (self.position(a)?, self.position(b)?);
        let g = match gate {
            BilateralGate::Cnot { .. } => Gate::Cnot { control: i, target: j },
            BilateralGate::Cz(..) => Gate::Cz(i, j),
        };
        let mut out = self.clone();
        out.permute(g);
        out.depolarize(i, j, noise.p_gate);
        Ok(out)
    }

    /// Tensor on an independent pair with coefficients `(p_I, p_X, p_Y, p_Z)` at the last position.
    pub fn append_pair(&self, pair: usize, coeffs: [f64; 4]) -> Result<Self> {
        let m = self.num_pairs();
        if m >= MAX_PAIRS {
            return Err(Error::SizeLimit(format!("{} pairs exceeds {MAX_PAIRS}", m + 1)));
        }
        if self.pairs.contains(&pair) {
            return Err(Error::Index(format!("pair {pair} is already present")));
        }
        // letter index of (x, z) in (I, X, Y, Z) order
        const LETTER: [usize; 4] = [0, 1, 3, 2];
        let mut probs = vec![0.0; self.probs.len() * 4];
        for (l, &p) in self.probs.iter().enumerate() {
            let (x, z) = (l & ((1 << m) - 1), l >> m);
            for (xz, letter) in LETTER.iter().enumerate() {
                let (bx, bz) = (xz & 1, xz >> 1);
                probs[(x | bx << m) | (z | bz << m) << (m + 1)] = p * coeffs[*letter];
            }
        }
        let mut pairs = self.pairs.clone();
        pairs.push(pair);
        Ok(BellDiagonalState { pairs, probs })
    }

    /// Bilateral Hadamard: swaps the `x` and `z` label bits of one pair, noiselessly.
    pub fn apply_hadamard(&self, pair: usize) -> Result<Self> {
        let i = self.position(pair)?;
        let mut out = self.clone();
        out.permute(Gate::H(i));
        Ok(out)
    }

    /// Z measurement of `pair` on both sides; the branch bit is the reported parity.
    pub fn measure_pair(&self, pair: usize, noise: &NoiseModel) -> Result<[Branch; 2]> {
        let i = self.position(pair)?;
        let m = self.num_pairs();
        let flip = noise.parity_flip();
        let low = (1usize << i) - 1;
        let squeeze = |l: usize| {
            let x = l & ((1 << m) - 1);
            let z = l >> m;
            let drop = |v: usize| (v & low) | ((v >> (i + 1)) << i);
            drop(x) | drop(z) << (m - 1)
        };
        let mut rest = vec![[0.0f64; 2]; 1 << (2 * (m - 1))];
        for (l, &p) in self.probs.iter().enumerate() {
            rest[squeeze(l)][(l >> i) & 1] += p;
        }
        let mut pairs = self.pairs.clone();
        pairs.remove(i);
        let branch = |r: usize| {
            let post: Vec<f64> = rest.iter().map(|v| (1.0 - flip) * v[r] + flip * v[1 - r]).collect();
            let probability: f64 = post.iter().sum();
            let state = (probability > 0.0).then(|| BellDiagonalState {
                pairs: pairs.clone(),
                probs: post.iter().map(|x| x / probability).collect(),
            });
            Branch { bit: r as u8, probability, state }
        };
        Ok([branch(0), branch(1)])
    }
}

/// Joint (syndrome, output label) probabilities of `c` on `input`, branching
/// exactly over every measurement outcome. Syndrome bit `j` is the reported
/// outcome of pair `keep + j`.
pub fn simulate(c: &Circuit, input: &BellDiagonalInput, noise: &NoiseModel) -> Result<OutputTable> {
    let (n, k) = (c.n(), c.keep());
    if n > MAX_PAIRS {
        return Err(Error::SizeLimit(format!("{n} pairs exceeds {MAX_PAIRS}")));
    }
    if input.n() != n {
        return Err(Error::Dimension(format!("{} input pairs for a circuit on {n}", input.n())));
    }
    let labels = 1usize << (2 * k);
    let mut mass = vec![0.0; labels << (n - k)];
    let state = BellDiagonalState::from_input(input)?;
    run(c.gates(), state, 0, 1.0, k, noise, &mut mass)?;
    Ok(OutputTable { n, k, syndromes: (0..1 << (n - k)).collect(), mass })
}

fn run(
    gates: &[CircuitGate],
    mut state: BellDiagonalState,
    syndrome: Syndrome,
    weight: f64,
    keep: usize,
    noise: &NoiseModel,
    mass: &mut [f64],
) -> Result<()> {
    for (idx, g) in gates.iter().enumerate() {
        state = match *g {
            CircuitGate::Cnot { control, target } => {
                state.apply_bilateral_gate(BilateralGate::Cnot { control, target }, noise)?
            }
            CircuitGate::Cz(a, b) => state.apply_bilateral_gate(BilateralGate::Cz(a, b), noise)?,
            CircuitGate::H(q) => state.apply_hadamard(q)?,
            CircuitGate::MeasureZ(q) => {
                for br in state.measure_pair(q, noise)? {
                    if let Some(s) = br.state {
                        let syn = syndrome | (u32::from(br.bit) << (q - keep));
                        run(&gates[idx + 1..], s, syn, weight * br.probability, keep, noise, mass)?;
                    }
                }
                return Ok(());
            }
        };
    }
    let labels = state.probs.len();
    let row = &mut mass[syndrome as usize * labels..(syndrome as usize + 1) * labels];
    for (r, p) in row.iter_mut().zip(&state.probs) {
        *r += weight * p;
    }
    Ok(())
}

/// Trivial-syndrome output fidelity of a shipped `n -> 1` circuit on Werner inputs.
pub fn evaluate_fixture(name: &str, f_in: f64, noise: &NoiseModel) -> Result<f64> {
    let c = Circuit::from_json(fixtures::circuit(name)?)?;
    let input = BellDiagonalInput::werner(c.n(), f_in)?;
    simulate(&c, &input, noise)?.fidelity(0)
}
