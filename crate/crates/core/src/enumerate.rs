//! Exhaustive enumeration of `n -> k` protocols, by graph orbits and by
//! symplectic normal forms, with deduplication by canonical statistics.
//!
//! The normal form of a protocol is
//!
//! ```text
//! M' = [[A, B], [0, A^T]],  A = [[I_k, 0], [T, I_{n-k}]],  B = [[0, R^T], [R, S + T R^T]]
//! ```
//!
//! with `T`, `R` arbitrary `(n-k) x k` and `S` a graph on the measured qubits.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::graph::orbit::{iso_cert, lc_class_representatives, lc_class_representatives_all, nk_iso_cert, Cert};
use crate::graph::{GraphFile, NKGraph};
use crate::stats::dedup::{dedup_key, DedupGroup, DedupKey, MAX_SYMPLECTIC_K};
use crate::stats::{full_statistics, trivial_statistics, DistillationStatistics, WeightEnumerator};
use crate::symplectic::{block_a, build_from_graph, upper_block, GraphMatrixForm, SymplecticMatrix};

/// Largest `n + k` for graph enumeration (needs an orbit database above 10 vertices).
pub const MAX_GRAPH_VERTICES: usize = 12;
/// Largest number of measured qubits for normal-form enumeration.
pub const MAX_MEASURED: usize = 8;
/// Largest number of measured qubits for [`SyndromePolicy::AllSyndromeSets`].
pub const MAX_SYNDROME_SET_MEASURED: usize = 5;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct NormalForm {
    pub n: usize,
    pub k: usize,
    /// Rows of `T`, each a `k`-bit word.
    pub t: Vec<u32>,
    /// Rows of `R`, each a `k`-bit word.
    pub r: Vec<u32>,
    /// Adjacency rows of `S` on the `n - k` measured qubits.
    pub s: Vec<u32>,
}

fn parity(x: u32) -> u32 {
    x.count_ones() & 1
}

impl NormalForm {
    pub fn new(n: usize, k: usize, t: Vec<u32>, r: Vec<u32>, s: Vec<u32>) -> Result<Self> {
        if k > n || k == 0 {
            return Err(Error::InvalidInput(format!("need 1 <= k <= n, got n={n}, k={k}")));
        }
        let m = n - k;
        if t.len() != m || r.len() != m || s.len() != m {
            return Err(Error::Dimension(format!("T, R and S need {m} rows")));
        }
        if t.iter().chain(&r).any(|&w| w >> k != 0) || s.iter().any(|&w| w >> m != 0) {
            return Err(Error::Dimension("row wider than its block".into()));
        }
        for a in 0..m {
            if s[a] >> a & 1 == 1 || (0..m).any(|b| (s[a] >> b & 1) != (s[b] >> a & 1)) {
                return Err(Error::InvalidInput("S must be symmetric with zero diagonal".into()));
            }
        }
        Ok(NormalForm { n, k, t, r, s })
    }

    pub fn to_symplectic(&self) -> SymplecticMatrix {
        let (n, k, m) = (self.n, self.k, self.n - self.k);
        let a = block_a(n, k, &BitMatrix::from_rows(k, self.t.clone()));
        let rows = (0..k)
            .map(|i| (0..m).filter(|&j| self.r[j] >> i & 1 == 1).fold(0u32, |acc, j| acc | 1 << (k + j)))
            .chain((0..m).map(|j| {
                let trt = (0..m).fold(0u32, |acc, b| acc | parity(self.t[j] & self.r[b]) << b);
                self.r[j] | (self.s[j] ^ trt) << k
            }))
            .collect();
        upper_block(n, &a, &BitMatrix::from_rows(n, rows))
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(f, "T={};R={};S={}", rows(&self.t), rows(&self.r), rows(&self.s))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProtocolSource {
    GraphOrbit { graph: GraphFile },
    Symplectic { normal_form: NormalForm },
}

impl ProtocolSource {
    pub fn matrix(&self) -> Result<SymplecticMatrix> {
        match self {
            ProtocolSource::GraphOrbit { graph } => {
                let g = NKGraph::from_file(graph)?;
                build_from_graph(&g, &g.find_valid_labeling()?, GraphMatrixForm::Block)
            }
            ProtocolSource::Symplectic { normal_form } => Ok(normal_form.to_symplectic()),
        }
    }
}

impl fmt::Display for ProtocolSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolSource::GraphOrbit { graph } => {
                let ins: Vec<String> = graph.inputs.iter().map(usize::to_string).collect();
                write!(f, "graph:{}:{}", graph.graph6, ins.join(","))
            }
            ProtocolSource::Symplectic { normal_form } => write!(f, "normal_form:{normal_form}"),
        }
    }
}

/// One protocol with its trivial-syndrome statistics.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ProtocolRecord {
    pub source: ProtocolSource,
    pub n: usize,
    pub k: usize,
    pub key: DedupKey,
    /// Denominator enumerator at `b = 0`.
    pub success: WeightEnumerator,
    /// Identity-label numerator enumerator at `b = 0`.
    pub identity: WeightEnumerator,
}

impl ProtocolRecord {
    pub fn from_source(source: ProtocolSource, k: usize, group: DedupGroup) -> Result<Self> {
        let m = source.matrix()?;
        let s = trivial_statistics(&m, k)?;
        Ok(ProtocolRecord {
            n: m.n(),
            k,
            key: dedup_key(&s, 0, group)?,
            success: s.denominator(0)?,
            identity: s.numerator(0, 0)?,
            source,
        })
    }

    /// `(p_succ, F_out)` at `b = 0` for Werner inputs of fidelity `f`.
    pub fn point(&self, f: f64) -> (f64, f64) {
        let p = self.success.werner(f);
        let w = self.identity.werner(f);
        (p, if p > 0.0 { w / p } else { 0.0 })
    }

    pub fn full_statistics(&self) -> Result<DistillationStatistics> {
        full_statistics(&self.source.matrix()?, self.k)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Graphs,
    NormalForms,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumConfig {
    /// Column constraint and column sorting for normal forms; `None` turns it on above `n + k = 6`.
    pub symmetry_breaking: Option<bool>,
    /// Also walk LC classes of disconnected graphs.
    pub include_disconnected: bool,
    /// Relabelling group of the statistics key; `None` uses the symplectic group when `k` allows it.
    pub group: Option<DedupGroup>,
    /// Resume from and write to this checkpoint file.
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_every: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            symmetry_breaking: None,
            include_disconnected: true,
            group: None,
            checkpoint: None,
            checkpoint_every: 100_000,
        }
    }
}

impl EnumConfig {
    pub fn symmetry_breaking_for(&self, n: usize, k: usize) -> bool {
        self.symmetry_breaking.unwrap_or(n + k > 6)
    }

    pub fn group_for(&self, k: usize) -> DedupGroup {
        self.group.unwrap_or(if k <= MAX_SYMPLECTIC_K { DedupGroup::Symplectic } else { DedupGroup::LocalPermutations })
    }
}

/// Isomorphism classes of graphs on `m` vertices, by one-vertex extension.
pub fn graph_iso_classes(m: usize) -> Result<Vec<Cert>> {
    if m > MAX_MEASURED {
        return Err(Error::SizeLimit(format!("graph catalogue above {MAX_MEASURED} vertices")));
    }
    let mut classes: Vec<Cert> = vec![vec![]];
    for size in 1..=m {
        let mut seen = HashSet::new();
        for base in &classes {
            for nb in 0u32..1 << (size - 1) {
                let mut adj = base.clone();
                for (v, row) in adj.iter_mut().enumerate() {
                    *row |= (nb >> v & 1) << (size - 1);
                }
                adj.push(nb);
                seen.insert(iso_cert(&adj));
            }
        }
        classes = seen.into_iter().collect();
        classes.sort();
    }
    Ok(classes)
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Non-decreasing sequences of length `len` over `c` values.
fn multichoose(c: u128, len: u128) -> u128 {
    if len == 0 {
        1
    } else if c == 0 {
        0
    } else {
        binomial(c + len - 1, len)
    }
}

/// Lazily indexed normal-form iteration space.
pub struct NormalFormSpace {
    n: usize,
    k: usize,
    /// Admissible `(t, r)` column pairs, encoded `t | r << (n - k)`.
    columns: Vec<u32>,
    sorted: bool,
    s_classes: Vec<Cert>,
    column_tuples: u64,
}

impl NormalFormSpace {
    pub fn new(n: usize, k: usize, symmetry_breaking: bool) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidInput(format!("need 1 <= k <= n, got n={n}, k={k}")));
        }
        let m = n - k;
        if m > MAX_MEASURED {
            return Err(Error::SizeLimit(format!("{m} measured qubits exceeds {MAX_MEASURED}")));
        }
        let columns: Vec<u32> = (0u32..1 << (2 * m))
            .filter(|&c| {
                let (t, r) = (c & ((1 << m) - 1), c >> m);
                !symmetry_breaking || (t <= r && r <= t ^ r)
            })
            .collect();
        let c = columns.len() as u128;
        let tuples = if symmetry_breaking { multichoose(c, k as u128) } else { c.pow(k as u32) };
        let s_classes = graph_iso_classes(m)?;
        let column_tuples = u64::try_from(tuples)
            .ok()
            .filter(|t| t.checked_mul(s_classes.len() as u64).is_some())
            .ok_or_else(|| Error::SizeLimit(format!("normal-form space for n={n}, k={k} overflows")))?;
        Ok(NormalFormSpace { n, k, columns, sorted: symmetry_breaking, s_classes, column_tuples })
    }

    pub fn len(&self) -> u64 {
        self.column_tuples * self.s_classes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn column_indices(&self, mut idx: u128) -> Vec<usize> {
        let c = self.columns.len();
        let k = self.k;
        if !self.sorted {
            return (0..k)
                .map(|_| {
                    let d = (idx % c as u128) as usize;
                    idx /= c as u128;
                    d
                })
                .collect();
        }
        let mut out = Vec::with_capacity(k);
        let mut lo = 0;
        for j in 0..k {
            let rest = (k - j - 1) as u128;
            for v in lo..c {
                let count = multichoose((c - v) as u128, rest);
                if idx < count {
                    out.push(v);
                    lo = v;
                    break;
                }
                idx -= count;
            }
        }
        out
    }

    pub fn get(&self, index: u64) -> NormalForm {
        let (n, k, m) = (self.n, self.k, self.n - self.k);
        let ns = self.s_classes.len() as u64;
        let s = self.s_classes[(index % ns) as usize].clone();
        let cols = self.column_indices((index / ns) as u128);
        let (mut t, mut r) = (vec![0u32; m], vec![0u32; m]);
        for (i, &ci) in cols.iter().enumerate() {
            let c = self.columns[ci];
            for a in 0..m {
                t[a] |= (c >> a & 1) << i;
                r[a] |= (c >> (m + a) & 1) << i;
            }
        }
        NormalForm { n, k, t, r, s }
    }
}

/// One valid `(n, k)`-graph per LC class and inequivalent choice of input vertices.
pub fn graph_candidates(n: usize, k: usize, include_disconnected: bool) -> Result<Vec<NKGraph>> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let total = n + k;
    if total > MAX_GRAPH_VERTICES {
        return Err(Error::SizeLimit(format!("n + k = {total} exceeds {MAX_GRAPH_VERTICES}")));
    }
    let reps = if include_disconnected { lc_class_representatives_all(total)? } else { lc_class_representatives(total)? };
    let mut out = Vec::new();
    for rep in reps {
        let mut seen = HashSet::new();
        for mask in 0u32..1 << total {
            if mask.count_ones() as usize != k || !seen.insert(nk_iso_cert(&rep, mask)) {
                continue;
            }
            let inputs: Vec<usize> = (0..total).filter(|&v| mask >> v & 1 == 1).collect();
            let g = NKGraph::new(rep.clone(), &inputs)?;
            if g.is_valid_code() {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Every protocol from the graph strategy, before deduplication.
pub fn enumerate_graphs(n: usize, k: usize, cfg: &EnumConfig) -> Result<Vec<ProtocolRecord>> {
    let group = cfg.group_for(k);
    graph_candidates(n, k, cfg.include_disconnected)?
        .into_par_iter()
        .map(|g| ProtocolRecord::from_source(ProtocolSource::GraphOrbit { graph: g.to_file() }, k, group))
        .collect()
}

/// Every protocol from the normal-form strategy, before deduplication.
pub fn enumerate_normal_forms(n: usize, k: usize, cfg: &EnumConfig) -> Result<Vec<ProtocolRecord>> {
    let group = cfg.group_for(k);
    let space = NormalFormSpace::new(n, k, cfg.symmetry_breaking_for(n, k))?;
    (0..space.len())
        .into_par_iter()
        .map(|i| ProtocolRecord::from_source(ProtocolSource::Symplectic { normal_form: space.get(i) }, k, group))
        .collect()
}

/// First record of every distinct key, in stream order.
pub fn dedup(records: impl IntoIterator<Item = ProtocolRecord>) -> Vec<ProtocolRecord> {
    let mut seen = HashSet::new();
    records.into_iter().filter(|r| seen.insert(r.key.clone())).collect()
}

pub fn key_set(records: &[ProtocolRecord]) -> BTreeSet<DedupKey> {
    records.iter().map(|r| r.key.clone()).collect()
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    strategy: Strategy,
    n: usize,
    k: usize,
    symmetry_breaking: bool,
    include_disconnected: bool,
    group: DedupGroup,
    total: u64,
    next: u64,
    records: Vec<ProtocolRecord>,
}

impl Checkpoint {
    fn same_run(&self, other: &Checkpoint) -> bool {
        (self.version, self.strategy, self.n, self.k, self.symmetry_breaking, self.include_disconnected, self.group, self.total)
            == (other.version, other.strategy, other.n, other.k, other.symmetry_breaking, other.include_disconnected, other.group, other.total)
    }

    fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec(self)?)?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }
}

/// Deduplicated transversal, computed in parallel chunks and check-pointed to
/// `cfg.checkpoint` after each chunk. The result does not depend on the number
/// of worker threads or on interruptions.
pub fn transversal(strategy: Strategy, n: usize, k: usize, cfg: &EnumConfig) -> Result<Vec<ProtocolRecord>> {
    run_transversal(strategy, n, k, cfg, usize::MAX)
}

/// [`transversal`] stopping after `max_chunks` chunks, as if interrupted.
pub(crate) fn run_transversal(
    strategy: Strategy,
    n: usize,
    k: usize,
    cfg: &EnumConfig,
    max_chunks: usize,
) -> Result<Vec<ProtocolRecord>> {
    let group = cfg.group_for(k);
    let symmetry_breaking = cfg.symmetry_breaking_for(n, k);
    let (graphs, space) = match strategy {
        Strategy::Graphs => (graph_candidates(n, k, cfg.include_disconnected)?, None),
        Strategy::NormalForms => (Vec::new(), Some(NormalFormSpace::new(n, k, symmetry_breaking)?)),
    };
    let total = space.as_ref().map_or(graphs.len() as u64, NormalFormSpace::len);
    let source = |i: u64| match &space {
        Some(s) => ProtocolSource::Symplectic { normal_form: s.get(i) },
        None => ProtocolSource::GraphOrbit { graph: graphs[i as usize].to_file() },
    };
    let mut state = Checkpoint {
        version: CHECKPOINT_VERSION,
        strategy,
        n,
        k,
        symmetry_breaking,
        include_disconnected: cfg.include_disconnected,
        group,
        total,
        next: 0,
        records: Vec::new(),
    };
    if let Some(path) = cfg.checkpoint.as_deref().filter(|p| p.exists()) {
        let saved: Checkpoint = serde_json::from_slice(&std::fs::read(path)?)?;
        if !saved.same_run(&state) {
            return Err(Error::InvalidInput(format!("checkpoint {} belongs to a different run", path.display())));
        }
        state = saved;
    }
    let mut seen: HashSet<DedupKey> = state.records.iter().map(|r| r.key.clone()).collect();
    let chunk = cfg.checkpoint_every.max(1) as u64;
    let mut chunks = 0;
    while state.next < total && chunks < max_chunks {
        chunks += 1;
        let hi = (state.next + chunk).min(total);
        let batch: Vec<ProtocolRecord> =
            (state.next..hi).into_par_iter().map(|i| ProtocolRecord::from_source(source(i), k, group)).collect::<Result<_>>()?;
        for r in batch {
            if seen.insert(r.key.clone()) {
                state.records.push(r);
            }
        }
        state.next = hi;
        if let Some(path) = &cfg.checkpoint {
            state.save(path)?;
        }
    }
    Ok(state.records)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SyndromePolicy {
    /// Accept only the trivial syndrome, without correction.
    TrivialOnly,
    /// Accept any set of syndromes, each corrected by its best local Pauli.
    AllSyndromeSets,
}

#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct HullPoint {
    pub p_succ: f64,
    pub fidelity: f64,
}

/// Upper hull of the achievable `(p_succ, F_out)` region at one input fidelity.
///
/// Mixing protocols with weights `w_i` yields `p = sum w_i p_i` and
/// `p F = sum w_i p_i F_i`, so the hull is taken in `(p, p F)` coordinates,
/// together with the origin (always discard).
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub f_in: f64,
    pub policy: SyndromePolicy,
    /// Hull vertices by increasing `p_succ`, origin excluded.
    pub hull: Vec<HullPoint>,
}

impl Envelope {
    fn from_points(f_in: f64, policy: SyndromePolicy, mut pts: Vec<(f64, f64)>) -> Self {
        pts.push((0.0, 0.0));
        // merge success probabilities that differ only by rounding
        for p in &mut pts {
            p.0 = (p.0 * 1e12).round() / 1e12;
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            if hull.last().is_some_and(|h| h.0 == p.0) {
                continue;
            }
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let hull = hull.into_iter().skip(1).map(|(p, w)| HullPoint { p_succ: p, fidelity: w / p }).collect();
        Envelope { f_in, policy, hull }
    }

    pub fn max_success(&self) -> f64 {
        self.hull.last().map_or(0.0, |h| h.p_succ)
    }

    /// Best mixed fidelity at success probability `p`, if reachable.
    pub fn fidelity_at(&self, p: f64) -> Option<f64> {
        if p <= 0.0 || p > self.max_success() * (1.0 + 1e-12) {
            return None;
        }
        let (mut x0, mut y0) = (0.0, 0.0);
        for h in &self.hull {
            let (x1, y1) = (h.p_succ, h.p_succ * h.fidelity);
            if p <= x1 * (1.0 + 1e-12) {
                let y = if x1 > x0 { y0 + (y1 - y0) * (p.min(x1) - x0) / (x1 - x0) } else { y1 };
                return Some(y / p);
            }
            (x0, y0) = (x1, y1);
        }
        None
    }
}

/// Largest fidelity difference between two hulls over their common support,
/// or infinity when their supports differ.
pub fn hull_gap(a: &Envelope, b: &Envelope) -> f64 {
    if (a.max_success() - b.max_success()).abs() > 1e-12 {
        return f64::INFINITY;
    }
    a.hull
        .iter()
        .chain(&b.hull)
        .map(|h| match (a.fidelity_at(h.p_succ), b.fidelity_at(h.p_succ)) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// `(p_b, p_b F_b)` per syndrome with the best local Pauli correction.
fn corrected_syndromes(stats: &DistillationStatistics, f: f64) -> Result<Vec<(f64, f64)>> {
    (0..1u32 << (stats.n - stats.k))
        .map(|b| {
            let p = stats.success_probability_werner(b, f)?;
            let best = (0..stats.labels() as u32)
                .map(|l| stats.numerator(b, l).map(|e| e.werner(f)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok((p, best))
        })
        .collect()
}

/// Hulls over a transversal for every input fidelity in `f_grid`.
///
/// For accepted syndrome sets the hull of all subset sums of the per-syndrome
/// points `(p_b, p_b F_b)` is traced by the prefixes of the syndromes sorted by
/// decreasing `F_b`, so no subset is enumerated explicitly.
pub fn pareto_envelope(records: &[ProtocolRecord], f_grid: &[f64], policy: SyndromePolicy) -> Result<Vec<Envelope>> {
    let full = match policy {
        SyndromePolicy::TrivialOnly => None,
        SyndromePolicy::AllSyndromeSets => {
            if let Some(r) = records.iter().find(|r| r.n - r.k > MAX_SYNDROME_SET_MEASURED) {
                return Err(Error::SizeLimit(format!(
                    "syndrome sets need n - k <= {MAX_SYNDROME_SET_MEASURED}, got {}",
                    r.n - r.k
                )));
            }
            Some(records.par_iter().map(ProtocolRecord::full_statistics).collect::<Result<Vec<_>>>()?)
        }
    };
    f_grid
        .iter()
        .map(|&f| {
            let pts: Vec<(f64, f64)> = match &full {
                None => records.iter().map(|r| r.point(f)).map(|(p, fo)| (p, p * fo)).collect(),
                Some(stats) => {
                    let mut pts = Vec::new();
                    for s in stats {
                        let mut rows = corrected_syndromes(s, f)?;
                        rows.retain(|r| r.0 > 0.0);
                        rows.sort_by(|a, b| (b.1 / b.0).total_cmp(&(a.1 / a.0)));
                        let (mut p, mut w) = (0.0, 0.0);
                        for (pb, wb) in rows {
                            p += pb;
                            w += wb;
                            pts.push((p, w));
                        }
                    }
                    pts
                }
            };
            Ok(Envelope::from_points(f, policy, pts))
        })
        .collect()
}
