//! Canonical keys for distillation statistics.
//!
//! Two protocols are equivalent at a syndrome when their tables of numerator
//! enumerators differ only by a relabelling of the output Paulis that a local
//! operation on the kept pairs can realise. Bilocal Cliffords on `k` pairs act
//! on labels as `Sp(2k, F2)`; the smaller group of per-pair `S3` relabellings
//! and pair permutations is also offered.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::raw_form;
use crate::stats::{DistillationStatistics, Syndrome};

/// Relabelling group used to canonicalise a table.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub enum DedupGroup {
    /// All symplectic maps on the `2k` label bits.
    #[default]
    Symplectic,
    /// `S3` per kept pair together with permutations of kept pairs.
    LocalPermutations,
    /// No canonicalisation.
    Exact,
}

/// Canonical statistics key; equal keys mean distillation-equivalent at that syndrome.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct DedupKey {
    pub n: usize,
    pub k: usize,
    pub table: Vec<u64>,
}

impl DedupKey {
    /// Short hex digest for tables and file output.
    pub fn digest(&self) -> String {
        let mut bytes = Vec::with_capacity(16 + 8 * self.table.len());
        bytes.extend((self.n as u64).to_le_bytes());
        bytes.extend((self.k as u64).to_le_bytes());
        for x in &self.table {
            bytes.extend(x.to_le_bytes());
        }
        crate::io::sha256_hex(&bytes)[..16].to_string()
    }
}

/// Largest `k` accepted for symplectic canonicalisation.
pub const MAX_SYMPLECTIC_K: usize = 4;

pub fn dedup_key(stats: &DistillationStatistics, b: Syndrome, group: DedupGroup) -> Result<DedupKey> {
    let table = stats.numerator_table(b)?;
    let canon = canonical_table(&table, stats.k, group)?;
    Ok(DedupKey { n: stats.n, k: stats.k, table: canon.into_iter().flatten().collect() })
}

/// Lexicographically smallest relabelling of a `4^k`-row table under `group`.
pub fn canonical_table(rows: &[Vec<u64>], k: usize, group: DedupGroup) -> Result<Vec<Vec<u64>>> {
    if rows.len() != 1 << (2 * k) {
        return Err(Error::Dimension(format!("{} rows for k={k}", rows.len())));
    }
    if group == DedupGroup::Exact || k == 0 {
        return Ok(rows.to_vec());
    }
    if group == DedupGroup::Symplectic && k > MAX_SYMPLECTIC_K {
        return Err(Error::SizeLimit(format!("symplectic canonicalisation supports k <= {MAX_SYMPLECTIC_K}")));
    }
    let mut distinct: Vec<&Vec<u64>> = rows.iter().collect();
    distinct.sort();
    distinct.dedup();
    let rank: Vec<u32> = rows.iter().map(|r| distinct.binary_search(&r).expect("row present") as u32).collect();
    let mut search = Search {
        k,
        group,
        rank: &rank,
        best: rank.clone(),
        images: Vec::with_capacity(2 * k),
        seq: vec![0; rank.len()],
        span: vec![0; rank.len()],
    };
    search.seq[0] = rank[0];
    search.dfs(0, false);
    Ok(search.best.iter().map(|&r| distinct[r as usize].clone()).collect())
}

struct Search<'a> {
    k: usize,
    group: DedupGroup,
    rank: &'a [u32],
    best: Vec<u32>,
    /// Chosen images of basis labels `e_0..e_{j-1}` (bit order `X_1..X_k, Z_1..Z_k`).
    images: Vec<u32>,
    seq: Vec<u32>,
    /// `span[i]` = image of label `i` for `i < 2^j`.
    span: Vec<u32>,
}

impl Search<'_> {
    fn candidates(&self, j: usize) -> Vec<u32> {
        let k = self.k;
        let labels = 1u32 << (2 * k);
        match self.group {
            DedupGroup::Symplectic => (1..labels)
                .filter(|&c| {
                    self.images.iter().enumerate().all(|(i, &h)| raw_form(h, c, k) == u32::from(i + k == j))
                })
                .filter(|&c| !self.span[..1 << j].contains(&c))
                .collect(),
            DedupGroup::LocalPermutations => {
                let letters = |q: usize| [1u32 << q, 1 << (q + k), (1 << q) | (1 << (q + k))];
                if j < k {
                    let used: Vec<usize> = self.images.iter().map(|&h| qubit_of(h, k)).collect();
                    (0..k).filter(|q| !used.contains(q)).flat_map(letters).collect()
                } else {
                    let hx = self.images[j - k];
                    letters(qubit_of(hx, k)).into_iter().filter(|&c| c != hx).collect()
                }
            }
            DedupGroup::Exact => unreachable!("exact tables are returned directly"),
        }
    }

    /// Returns true when `best` was replaced inside this subtree.
    fn dfs(&mut self, j: usize, less: bool) -> bool {
        let dim = 2 * self.k;
        if j == dim {
            if less {
                self.best.copy_from_slice(&self.seq);
                return true;
            }
            return false;
        }
        let half = 1usize << j;
        let mut less = less;
        let mut updated = false;
        for c in self.candidates(j) {
            for i in 0..half {
                let img = c ^ self.span[i];
                self.span[half + i] = img;
                self.seq[half + i] = self.rank[img as usize];
            }
            let child_less = if less {
                true
            } else {
                match self.seq[half..2 * half].cmp(&self.best[half..2 * half]) {
                    std::cmp::Ordering::Greater => continue,
                    std::cmp::Ordering::Less => true,
                    std::cmp::Ordering::Equal => false,
                }
            };
            self.images.push(c);
            if self.dfs(j + 1, child_less) {
                updated = true;
                less = false;
            }
            self.images.pop();
        }
        updated
    }
}

fn qubit_of(label: u32, k: usize) -> usize {
    ((label | label >> k) & ((1 << k) - 1)).trailing_zeros() as usize
}
