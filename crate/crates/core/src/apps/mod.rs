//! Downstream evaluators: BB84 key rates with syndrome binning, the DEJMPS
//! baseline and teleportation of Steane-encoded states.
//!
//! Bell-diagonal 4-vectors are ordered `(p_I, p_X, p_Y, p_Z)` throughout. For a
//! single kept pair, statistics tables index labels as `x | z << 1`, which is
//! converted with [`letters_from_labels`].

mod steane;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{transversal, EnumConfig, Strategy};
use crate::error::{Error, Result};
use crate::graph::NKGraph;
use crate::stats::{
    bell_diagonal_table, trivial_statistics, werner_coefficients, BellDiagonalInput, DistillationStatistics,
    OutputTable, SyndromeMode,
};
use crate::symplectic::{build_from_graph, gates_to_symplectic, Gate, GraphMatrixForm, SymplecticMatrix};

pub use steane::{teleport_steane, PairChannel, SteaneFixture, BLOCK};

/// Position in `(I, X, Y, Z)` of the single-pair label `x | z << 1`.
const LETTER_OF_LABEL: [usize; 4] = [0, 1, 3, 2];

/// Binary entropy in bits, `0` at the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Phase and bit error rates `(e_x, e_z)` of a Bell-diagonal pair.
pub fn qber(c: [f64; 4]) -> (f64, f64) {
    (c[3] + c[2], c[1] + c[2])
}

/// Asymptotic BB84 secret fraction `max(0, 1 - h(e_x) - h(e_z))`.
pub fn bb84_rate(c: [f64; 4]) -> f64 {
    let (ex, ez) = qber(c);
    (1.0 - binary_entropy(ex) - binary_entropy(ez)).max(0.0)
}

/// Werner fidelity at which the BB84 rate of an undistilled pair reaches zero.
pub fn werner_rate_threshold() -> f64 {
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bb84_rate(werner_coefficients(mid)) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Reorder a single-pair row indexed by label into `(I, X, Y, Z)`.
pub fn letters_from_labels(row: &[f64]) -> Result<[f64; 4]> {
    if row.len() != 4 {
        return Err(Error::Dimension(format!("{} labels, expected 4", row.len())));
    }
    let mut c = [0.0; 4];
    for (l, &v) in row.iter().enumerate() {
        c[LETTER_OF_LABEL[l]] = v;
    }
    Ok(c)
}

/// Best local relabelling of a Bell-diagonal vector: the largest coefficient
/// becomes `I` and the smallest remaining one `Y`, which minimises both error
/// rates. Bilateral local Cliffords and Paulis reach every permutation of the
/// four Bell states, so this correction is always available.
pub fn best_correction(c: [f64; 4]) -> [f64; 4] {
    let mut idx = [0usize, 1, 2, 3];
    let i = (0..4).fold(0, |b, j| if c[j] > c[b] { j } else { b });
    idx.swap(0, i);
    let rest = &mut idx[1..];
    let y = (0..3).fold(0, |b, j| if c[rest[j]] < c[rest[b]] { j } else { b });
    rest.swap(y, 2);
    // idx now lists the sources of I, X, Z, Y
    [c[idx[0]], c[idx[1]], c[idx[3]], c[idx[2]]]
}

/// Key rate of one syndrome bin.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct SyndromeRate {
    pub syndrome: u32,
    pub probability: f64,
    pub qber_x: f64,
    pub qber_z: f64,
    pub rate: f64,
}

/// Key rates of one protocol at one input fidelity, per distilled pair.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct KeyRateResult {
    pub f_in: f64,
    pub bins: Vec<SyndromeRate>,
    /// `sum_b p_b rate_b`.
    pub binned_rate: f64,
    /// `p_0 rate_0`.
    pub detection_rate: f64,
}

fn require_single_output(stats: &DistillationStatistics) -> Result<()> {
    if stats.k != 1 {
        return Err(Error::InvalidInput(format!("key rates need one kept pair, got k={}", stats.k)));
    }
    Ok(())
}

/// Per-syndrome `(p_b, corrected state)` for Werner inputs.
fn corrected_bins(table: &OutputTable) -> Result<Vec<(u32, f64, [f64; 4])>> {
    table
        .syndromes
        .iter()
        .map(|&b| {
            let p = table.success_probability(b)?;
            let c = if p > 0.0 { best_correction(letters_from_labels(&table.output_coefficients(b)?)?) } else { [0.0; 4] };
            Ok((b, p, c))
        })
        .collect()
}

/// BB84 rates with each syndrome post-processed as its own bin.
pub fn binned_key_rate(stats: &DistillationStatistics, f_grid: &[f64]) -> Result<Vec<KeyRateResult>> {
    require_single_output(stats)?;
    f_grid
        .par_iter()
        .map(|&f| {
            let bins: Vec<SyndromeRate> = corrected_bins(&stats.werner_table(f))?
                .into_iter()
                .map(|(b, p, c)| {
                    let (qber_x, qber_z) = qber(c);
                    let rate = if p > 0.0 { bb84_rate(c) } else { 0.0 };
                    SyndromeRate { syndrome: b, probability: p, qber_x, qber_z, rate }
                })
                .collect();
            let binned_rate = bins.iter().map(|s| s.probability * s.rate).sum();
            let detection_rate = bins.iter().find(|s| s.syndrome == 0).map_or(0.0, |s| s.probability * s.rate);
            Ok(KeyRateResult { f_in: f, bins, binned_rate, detection_rate })
        })
        .collect()
}

/// Output of the strategy that keeps every run and averages the corrected states.
pub fn average_state(stats: &DistillationStatistics, f: f64) -> Result<[f64; 4]> {
    require_single_output(stats)?;
    let mut avg = [0.0; 4];
    for (_, p, c) in corrected_bins(&stats.werner_table(f))? {
        for (a, x) in avg.iter_mut().zip(c) {
            *a += p * x;
        }
    }
    Ok(avg)
}

/// Fidelity of [`average_state`].
pub fn average_state_strategy(stats: &DistillationStatistics, f: f64) -> Result<f64> {
    Ok(average_state(stats, f)?[0])
}

/// Bilateral CNOT from pair 0 onto pair 1, which is measured.
pub fn bilateral_cnot() -> SymplecticMatrix {
    gates_to_symplectic(&[Gate::Cnot { control: 0, target: 1 }], 2).expect("fixed two-qubit circuit")
}

/// The DEJMPS local rotations act on Bell-diagonal coefficients by swapping `Y` and `Z`.
pub fn dejmps_rotation(c: [f64; 4]) -> [f64; 4] {
    [c[0], c[1], c[3], c[2]]
}

/// One DEJMPS round on two Bell-diagonal pairs: `(p_succ, output)`.
pub fn dejmps_step(a: [f64; 4], b: [f64; 4]) -> Result<(f64, [f64; 4])> {
    let input = BellDiagonalInput::new(vec![dejmps_rotation(a), dejmps_rotation(b)])?;
    let table = bell_diagonal_table(&bilateral_cnot(), 1, &input, SyndromeMode::Trivial)?;
    let p = table.success_probability(0)?;
    Ok((p, letters_from_labels(&table.output_coefficients(0)?)?))
}

/// Symmetric DEJMPS iterated `rounds` times from Werner pairs: `(p_succ of the last round, output)`.
pub fn dejmps_iterate(f: f64, rounds: usize) -> Result<(f64, [f64; 4])> {
    let mut state = (1.0, werner_coefficients(f));
    for _ in 0..rounds {
        state = dejmps_step(state.1, state.1)?;
    }
    Ok(state)
}

/// How a baseline built from independent 2→1 rounds pays for failures.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Accounting {
    /// Each pair is retried on its own until it succeeds.
    Independent,
    /// All rounds must succeed together, otherwise everything is discarded.
    Joint,
}

/// Expected raw pairs per accepted run of a protocol consuming `n` pairs.
pub fn resource_cost(n: usize, p_succ: f64) -> Result<f64> {
    if p_succ <= 0.0 {
        return Err(Error::ZeroProbability(0));
    }
    Ok(n as f64 / p_succ)
}

/// Expected raw pairs to deliver `pairs` outputs of one DEJMPS round each.
pub fn dejmps_cost(f: f64, pairs: usize, accounting: Accounting) -> Result<f64> {
    let (p, _) = dejmps_step(werner_coefficients(f), werner_coefficients(f))?;
    match accounting {
        Accounting::Independent => Ok(pairs as f64 * resource_cost(2, p)?),
        Accounting::Joint => resource_cost(2 * pairs, p.powi(pairs as i32)),
    }
}

/// Matrix of a protocol given as an `(n, k)`-graph.
pub fn graph_protocol(g: &NKGraph) -> Result<SymplecticMatrix> {
    build_from_graph(g, &g.find_valid_labeling()?, GraphMatrixForm::Block)
}

/// Trivial-syndrome statistics of the `(10, 7)` teleportation graph.
pub fn ten_to_seven_statistics() -> Result<DistillationStatistics> {
    let g = NKGraph::from_json(crate::fixtures::TEN_TO_SEVEN)?;
    trivial_statistics(&graph_protocol(&g)?, g.k_in())
}

/// Teleportation strategies compared for the encoded Steane block.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TeleportStrategy {
    /// Seven raw Werner pairs.
    Undistilled,
    /// The `(10, 7)` protocol, accepting the trivial syndrome.
    TenToSeven,
    /// Seven independent DEJMPS rounds.
    Dejmps,
}

impl TeleportStrategy {
    pub const ALL: [TeleportStrategy; 3] =
        [TeleportStrategy::Undistilled, TeleportStrategy::TenToSeven, TeleportStrategy::Dejmps];
}

/// One row of the teleportation comparison.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct TeleportPoint {
    pub f_in: f64,
    pub strategy: TeleportStrategy,
    pub infidelity: f64,
    /// Raw pairs per delivered block; DEJMPS rounds are retried independently.
    pub expected_pairs: f64,
}

/// Infidelity and cost of every strategy at every input fidelity, with
/// `stats` the trivial-syndrome statistics of an `n -> 7` protocol.
pub fn teleportation_curves(stats: &DistillationStatistics, f_grid: &[f64]) -> Result<Vec<TeleportPoint>> {
    if stats.k != BLOCK {
        return Err(Error::InvalidInput(format!("teleportation needs {BLOCK} kept pairs, got k={}", stats.k)));
    }
    let rows: Vec<Vec<TeleportPoint>> = f_grid
        .par_iter()
        .map(|&f| {
            TeleportStrategy::ALL
                .iter()
                .map(|&strategy| {
                    let (infidelity, expected_pairs) = match strategy {
                        TeleportStrategy::Undistilled => {
                            (teleport_steane(&PairChannel::Independent(vec![werner_coefficients(f); BLOCK]))?, BLOCK as f64)
                        }
                        TeleportStrategy::TenToSeven => {
                            let t = stats.werner_table(f);
                            let p = t.success_probability(0)?;
                            (teleport_steane(&PairChannel::Correlated(t.output_coefficients(0)?))?, resource_cost(stats.n, p)?)
                        }
                        TeleportStrategy::Dejmps => {
                            let (_, out) = dejmps_step(werner_coefficients(f), werner_coefficients(f))?;
                            (
                                teleport_steane(&PairChannel::Independent(vec![out; BLOCK]))?,
                                dejmps_cost(f, BLOCK, Accounting::Independent)?,
                            )
                        }
                    };
                    Ok(TeleportPoint { f_in: f, strategy, infidelity, expected_pairs })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Best key rate per raw pair over all `n -> 1` protocols, for both post-processings.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct KeyRateEnvelopePoint {
    pub f_in: f64,
    pub n: usize,
    pub binned_rate: f64,
    pub detection_rate: f64,
}

/// Key-rate envelopes of the `n -> 1` transversal for each `n` in `ns`.
pub fn key_rate_envelopes(ns: &[usize], f_grid: &[f64]) -> Result<Vec<KeyRateEnvelopePoint>> {
    let mut out = Vec::new();
    for &n in ns {
        let records = transversal(Strategy::Graphs, n, 1, &EnumConfig::default())?;
        let stats = records.par_iter().map(|r| r.full_statistics()).collect::<Result<Vec<_>>>()?;
        let rates = stats.par_iter().map(|s| binned_key_rate(s, f_grid)).collect::<Result<Vec<_>>>()?;
        for (i, &f) in f_grid.iter().enumerate() {
            let best = |pick: fn(&KeyRateResult) -> f64| rates.iter().map(|r| pick(&r[i])).fold(0.0, f64::max) / n as f64;
            out.push(KeyRateEnvelopePoint {
                f_in: f,
                n,
                binned_rate: best(|r| r.binned_rate),
                detection_rate: best(|r| r.detection_rate),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
