//! Orbits under local complementation and the `(n, k)` equivalence moves.
//!
//! Graphs are handled through their isomorphism certificates (canonically
//! relabelled adjacency rows). An LC class is represented by the smallest
//! certificate in its orbit, which makes representatives independent of the
//! order in which classes are discovered.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::fixtures;
use crate::graph::canon::{canonical_form, canonical_form_uncoloured};
use crate::graph::{graph6, local_complement_rows, NKGraph};

/// Canonical adjacency rows of a graph up to isomorphism.
pub type Cert = Vec<u32>;

/// Largest vertex count for which LC classes are generated from scratch.
pub const MAX_GENERATED_VERTICES: usize = 10;
/// Largest vertex count accepted by [`orbit_canonical_form`].
pub const MAX_ORBIT_VERTICES: usize = 12;

pub fn iso_cert(adj: &[u32]) -> Cert {
    canonical_form_uncoloured(adj).cert
}

/// Every isomorphism class in the LC orbit of `adj`.
pub fn lc_orbit(adj: &[u32]) -> HashSet<Cert> {
    let start = iso_cert(adj);
    let mut seen: HashSet<Cert> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(g) = queue.pop_front() {
        for v in 0..g.len() {
            let mut h = g.clone();
            local_complement_rows(&mut h, v);
            let c = iso_cert(&h);
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    seen
}

/// Representative (smallest certificate) of the LC class of `adj`.
pub fn lc_representative(adj: &[u32]) -> Cert {
    lc_orbit(adj).into_iter().min().expect("orbit contains the start graph")
}

/// Connected LC-class representatives for `1..=max_n` vertices, built by
/// extending each class on `N - 1` vertices with one new vertex.
///
/// A connected graph always has a vertex whose removal keeps it connected, and
/// LC moves on the remaining graph lift to the whole graph, so every class on
/// `N` vertices contains an extension of some representative on `N - 1`.
pub fn generate_lc_classes(max_n: usize) -> Result<Vec<Vec<Cert>>> {
    if max_n > MAX_GENERATED_VERTICES {
        return Err(Error::SizeLimit(format!(
            "generating LC classes above {MAX_GENERATED_VERTICES} vertices is not supported"
        )));
    }
    let mut all: Vec<Vec<Cert>> = Vec::new();
    if max_n == 0 {
        return Ok(all);
    }
    all.push(vec![vec![0]]);
    for n in 2..=max_n {
        let prev = &all[n - 2];
        let mut memo: HashSet<Cert> = HashSet::new();
        let mut reps: Vec<Cert> = Vec::new();
        for base in prev {
            for nb in 1u32..(1 << (n - 1)) {
                let mut adj = base.clone();
                for (v, row) in adj.iter_mut().enumerate() {
                    *row |= ((nb >> v) & 1) << (n - 1);
                }
                adj.push(nb);
                let c = iso_cert(&adj);
                if memo.contains(&c) {
                    continue;
                }
                let orbit = lc_orbit(&c);
                reps.push(orbit.iter().min().expect("non-empty orbit").clone());
                memo.extend(orbit);
            }
        }
        reps.sort();
        all.push(reps);
    }
    Ok(all)
}

/// Connected LC-class representatives on `n` vertices.
///
/// Shipped tables cover `n <= 9`; larger sizes are read from
/// `$DISTIL_CACHE_DIR/lc_classes_{n}.g6` when present.
pub fn lc_class_representatives(n: usize) -> Result<Vec<Cert>> {
    if let Some(text) = fixtures::lc_classes(n) {
        return parse_orbit_db(text);
    }
    let path = crate::io::cache_dir().join(format!("lc_classes_{n}.g6"));
    if path.exists() {
        return parse_orbit_db(&std::fs::read_to_string(path)?);
    }
    Err(Error::SizeLimit(format!(
        "no LC class database for {n} vertices (self-generation supports up to {MAX_GENERATED_VERTICES})"
    )))
}

/// LC classes on `n` vertices including disconnected ones, as disjoint unions
/// of connected representatives (one multiset of components per class).
pub fn lc_class_representatives_all(n: usize) -> Result<Vec<Cert>> {
    let tables: Vec<Vec<Cert>> = (1..=n).map(lc_class_representatives).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut parts: Vec<(usize, usize)> = Vec::new();
    collect_unions(n, n, usize::MAX, &tables, &mut parts, &mut out);
    Ok(out)
}

fn collect_unions(
    remaining: usize,
    max_size: usize,
    max_index: usize,
    tables: &[Vec<Cert>],
    parts: &mut Vec<(usize, usize)>,
    out: &mut Vec<Cert>,
) {
    if remaining == 0 {
        let mut adj: Vec<u32> = Vec::new();
        for &(size, idx) in parts.iter() {
            let off = adj.len();
            adj.extend(tables[size - 1][idx].iter().map(|&r| r << off));
        }
        out.push(adj);
        return;
    }
    for size in (1..=max_size.min(remaining)).rev() {
        let limit = if size == max_size { max_index } else { usize::MAX };
        for idx in 0..tables[size - 1].len() {
            if idx > limit {
                break;
            }
            parts.push((size, idx));
            collect_unions(remaining - size, size, idx, tables, parts, out);
            parts.pop();
        }
    }
}

pub fn parse_orbit_db(text: &str) -> Result<Vec<Cert>> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(graph6::decode).collect()
}

pub fn format_orbit_db(reps: &[Cert]) -> String {
    reps.iter().map(|r| graph6::encode(r) + "\n").collect()
}

/// Certificate of an `(n, k)`-graph class: canonical rows with outputs first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OrbitCertificate {
    pub n: usize,
    pub k: usize,
    pub rows: Vec<u32>,
}

/// Certificate up to `(n, k)`-permutations only.
pub fn nk_iso_cert(adj: &[u32], inputs: u32) -> Vec<u32> {
    let outs: Vec<usize> = (0..adj.len()).filter(|&v| inputs >> v & 1 == 0).collect();
    let ins: Vec<usize> = (0..adj.len()).filter(|&v| inputs >> v & 1 == 1).collect();
    canonical_form(adj, &[outs, ins]).cert
}

/// Canonical representative of the class of `g` under local complementations,
/// input edge flips and `(n, k)`-permutations, found by closing the orbit.
pub fn orbit_canonical_form(g: &NKGraph) -> Result<(NKGraph, OrbitCertificate)> {
    let total = g.num_vertices();
    if total > MAX_ORBIT_VERTICES {
        return Err(Error::SizeLimit(format!("{total} vertices exceeds {MAX_ORBIT_VERTICES}")));
    }
    let (n, k) = (g.n_out(), g.k_in());
    let inputs = if k == 0 { 0 } else { ((1u32 << k) - 1) << n };
    let start = nk_iso_cert(g.adjacency(), g.input_mask());
    let mut seen: HashSet<Vec<u32>> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        let mut push = |h: Vec<u32>| {
            let hc = nk_iso_cert(&h, inputs);
            if seen.insert(hc.clone()) {
                queue.push_back(hc);
            }
        };
        for v in 0..total {
            let mut h = c.clone();
            local_complement_rows(&mut h, v);
            push(h);
        }
        for u in n..total {
            for v in u + 1..total {
                let mut h = c.clone();
                h[u] ^= 1 << v;
                h[v] ^= 1 << u;
                push(h);
            }
        }
    }
    let rows = seen.into_iter().min().expect("orbit is non-empty");
    let graph = NKGraph::from_parts_unchecked(rows.clone(), inputs);
    Ok((graph, OrbitCertificate { n, k, rows }))
}

/// LC-class counts and memo sizes, handy for diagnostics.
pub fn class_counts(tables: &[Vec<Cert>]) -> Vec<usize> {
    tables.iter().map(Vec::len).collect()
}

/// Map from isomorphism certificate to class index, for every graph in the given classes.
pub fn class_index(reps: &[Cert]) -> HashMap<Cert, usize> {
    let mut map = HashMap::new();
    for (i, r) in reps.iter().enumerate() {
        for c in lc_orbit(r) {
            map.insert(c, i);
        }
    }
    map
}
