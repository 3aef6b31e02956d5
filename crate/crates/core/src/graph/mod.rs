//! `(n, k)`-graphs: simple graphs whose vertices are split into outputs and inputs.
//!
//! The adjacency matrix is stored as one `u32` row per vertex. Inputs are a bit
//! mask over vertex indices; every other vertex is an output.

pub mod canon;
pub mod graph6;
pub mod orbit;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Largest vertex count accepted by [`NKGraph`].
pub const MAX_VERTICES: usize = 30;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct NKGraph {
    adj: Vec<u32>,
    inputs: u32,
}

/// Ordering of the output vertices; the first `k` are kept, the rest measured.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Labeling {
    pub output_order: Vec<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtensionKind {
    OutputExtension,
    InputExtension,
}

/// JSON envelope used on disk.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GraphFile {
    pub graph6: String,
    pub inputs: Vec<usize>,
}

impl NKGraph {
    /// Build from adjacency rows and a list of input vertices.
    pub fn new(adj: Vec<u32>, inputs: &[usize]) -> Result<Self> {
        let n = adj.len();
        if n > MAX_VERTICES {
            return Err(Error::SizeLimit(format!("{n} vertices exceeds {MAX_VERTICES}")));
        }
        let full = full_mask(n);
        for (i, &r) in adj.iter().enumerate() {
            if r & !full != 0 {
                return Err(Error::Dimension(format!("row {i} has bits beyond {n} vertices")));
            }
            if (r >> i) & 1 == 1 {
                return Err(Error::InvalidInput(format!("loop at vertex {i}")));
            }
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                if (adj[j] >> i) & 1 == 0 {
                    return Err(Error::InvalidInput(format!("asymmetric edge {i}-{j}")));
                }
                bits &= bits - 1;
            }
        }
        let mut mask = 0u32;
        for &v in inputs {
            if v >= n {
                return Err(Error::Index(format!("input vertex {v} out of range")));
            }
            if mask >> v & 1 == 1 {
                return Err(Error::InvalidInput(format!("input vertex {v} listed twice")));
            }
            mask |= 1 << v;
        }
        Ok(NKGraph { adj, inputs: mask })
    }

    pub fn from_edges(vertices: usize, edges: &[(usize, usize)], inputs: &[usize]) -> Result<Self> {
        if vertices > MAX_VERTICES {
            return Err(Error::SizeLimit(format!("{vertices} vertices exceeds {MAX_VERTICES}")));
        }
        let mut adj = vec![0u32; vertices];
        for &(u, v) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::Index(format!("edge {u}-{v} out of range")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("loop at vertex {u}")));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Self::new(adj, inputs)
    }

    pub(crate) fn from_parts_unchecked(adj: Vec<u32>, inputs: u32) -> Self {
        NKGraph { adj, inputs }
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        let adj = graph6::decode(&file.graph6)?;
        Self::new(adj, &file.inputs)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile { graph6: graph6::encode(&self.adj), inputs: self.inputs() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph envelope serializes")
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn n_out(&self) -> usize {
        self.adj.len() - self.k_in()
    }

    pub fn k_in(&self) -> usize {
        self.inputs.count_ones() as usize
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.adj
    }

    pub fn input_mask(&self) -> u32 {
        self.inputs
    }

    pub fn output_mask(&self) -> u32 {
        full_mask(self.adj.len()) & !self.inputs
    }

    pub fn inputs(&self) -> Vec<usize> {
        bits_of(self.inputs)
    }

    pub fn outputs(&self) -> Vec<usize> {
        bits_of(self.output_mask())
    }

    pub fn is_input(&self, v: usize) -> bool {
        (self.inputs >> v) & 1 == 1
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.adj[u] >> v) & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> u32 {
        self.adj[v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.adj.len() {
            for v in bits_of(self.adj[u] >> (u + 1)) {
                out.push((u, u + 1 + v));
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adj.len();
        if n == 0 {
            return true;
        }
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let mut next = 0u32;
            for v in bits_of(frontier) {
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full_mask(n)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.adj.len() {
            return Err(Error::Index(format!("vertex {v} out of range")));
        }
        Ok(())
    }

    /// Complement the subgraph induced on the neighbourhood of `v`.
    pub fn local_complement(&self, v: usize) -> Result<NKGraph> {
        self.check_vertex(v)?;
        let mut adj = self.adj.clone();
        local_complement_rows(&mut adj, v);
        Ok(NKGraph { adj, inputs: self.inputs })
    }

    /// Toggle the edge between two input vertices.
    pub fn edge_flip(&self, u: usize, v: usize) -> Result<NKGraph> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidMove(format!("edge flip needs two distinct vertices, got {u}")));
        }
        if !self.is_input(u) || !self.is_input(v) {
            return Err(Error::InvalidMove(format!("edge flips are only allowed between inputs, got {u}-{v}")));
        }
        let mut adj = self.adj.clone();
        adj[u] ^= 1 << v;
        adj[v] ^= 1 << u;
        Ok(NKGraph { adj, inputs: self.inputs })
    }

    /// Relabel vertices: vertex `v` becomes `perm[v]`. Inputs must map to inputs.
    pub fn apply_nk_permutation(&self, perm: &[usize]) -> Result<NKGraph> {
        let n = self.adj.len();
        if perm.len() != n {
            return Err(Error::Dimension(format!("permutation of length {} for {n} vertices", perm.len())));
        }
        let mut seen = 0u32;
        for (v, &p) in perm.iter().enumerate() {
            if p >= n || seen >> p & 1 == 1 {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            seen |= 1 << p;
            if self.is_input(v) != self.is_input(p) {
                return Err(Error::InvalidMove(format!("permutation maps vertex {v} across the input/output partition")));
            }
        }
        Ok(self.relabel(perm))
    }

    /// Relabel without checking the partition; inputs follow their vertices.
    pub fn relabel(&self, perm: &[usize]) -> NKGraph {
        let n = self.adj.len();
        let mut adj = vec![0u32; n];
        let mut inputs = 0u32;
        for v in 0..n {
            adj[perm[v]] = bits_of(self.adj[v]).into_iter().fold(0, |acc, w| acc | 1 << perm[w]);
            if self.is_input(v) {
                inputs |= 1 << perm[v];
            }
        }
        NKGraph { adj, inputs }
    }

    /// Rows `a_i` (inputs ascending), columns in the given output order.
    pub fn codeword_generators(&self, labeling: &Labeling) -> BitMatrix {
        let rows = self
            .inputs()
            .iter()
            .map(|&i| {
                labeling
                    .output_order
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (c, &o)| acc | (((self.adj[i] >> o) & 1) << c))
            })
            .collect();
        BitMatrix::from_rows(self.n_out(), rows)
    }

    /// The identity labeling: outputs in ascending vertex order.
    pub fn natural_labeling(&self) -> Labeling {
        Labeling { output_order: self.outputs() }
    }

    pub fn is_valid_code(&self) -> bool {
        self.codeword_generators(&self.natural_labeling()).rank() == self.k_in()
    }

    /// RREF pivots of the codeword matrix must be the first `k` columns.
    pub fn is_valid_labeling(&self, labeling: &Labeling) -> bool {
        if !self.is_labeling(labeling) {
            return false;
        }
        let k = self.k_in();
        self.codeword_generators(labeling).rref().pivots == (0..k).collect::<Vec<_>>()
    }

    fn is_labeling(&self, labeling: &Labeling) -> bool {
        let mut sorted = labeling.output_order.clone();
        sorted.sort_unstable();
        sorted == self.outputs()
    }

    /// Pivot columns of the codeword RREF first, remaining outputs after, both in vertex order.
    pub fn find_valid_labeling(&self) -> Result<Labeling> {
        let outputs = self.outputs();
        let a = self.codeword_generators(&self.natural_labeling());
        let pivots = a.rref().pivots;
        if pivots.len() < self.k_in() {
            return Err(Error::InvalidCode(format!(
                "codeword generators have rank {} < k = {}",
                pivots.len(),
                self.k_in()
            )));
        }
        let mut order: Vec<usize> = pivots.iter().map(|&p| outputs[p]).collect();
        order.extend(outputs.iter().enumerate().filter(|(c, _)| !pivots.contains(c)).map(|(_, &o)| o));
        Ok(Labeling { output_order: order })
    }

    /// Adjacency among outputs in labeling order.
    pub fn output_adjacency(&self, labeling: &Labeling) -> BitMatrix {
        let order = &labeling.output_order;
        let rows = order
            .iter()
            .map(|&u| order.iter().enumerate().fold(0u32, |acc, (c, &v)| acc | (((self.adj[u] >> v) & 1) << c)))
            .collect();
        BitMatrix::from_rows(order.len(), rows)
    }

    /// The `k x (n-k)` block `R~` with RREF of the codeword matrix equal to `[I_k | R~]`.
    pub fn reduced_codewords(&self, labeling: &Labeling) -> Result<BitMatrix> {
        if !self.is_valid_labeling(labeling) {
            return Err(Error::InvalidLabeling(format!("{:?} does not put pivots first", labeling.output_order)));
        }
        let k = self.k_in();
        let m = self.codeword_generators(labeling).rref().matrix;
        Ok(BitMatrix::from_rows(self.n_out() - k, m.rows.iter().map(|&r| r >> k).collect()))
    }

    /// All one-vertex extensions; the new vertex is appended with index `N`.
    pub fn extend(&self, kind: ExtensionKind) -> Result<Vec<NKGraph>> {
        let n = self.adj.len();
        if n + 1 > MAX_VERTICES || n >= 24 {
            return Err(Error::SizeLimit(format!("cannot extend a {n}-vertex graph")));
        }
        let allowed = match kind {
            ExtensionKind::OutputExtension => full_mask(n),
            ExtensionKind::InputExtension => self.output_mask(),
        };
        let new_inputs = match kind {
            ExtensionKind::OutputExtension => self.inputs,
            ExtensionKind::InputExtension => self.inputs | 1 << n,
        };
        let choices = bits_of(allowed);
        let mut out = Vec::with_capacity((1usize << choices.len()) - 1);
        for sub in 1u32..(1u32 << choices.len()) {
            let nb = bits_of(sub).into_iter().fold(0u32, |acc, i| acc | 1 << choices[i]);
            let mut adj = self.adj.clone();
            for v in bits_of(nb) {
                adj[v] |= 1 << n;
            }
            adj.push(nb);
            out.push(NKGraph { adj, inputs: new_inputs });
        }
        Ok(out)
    }

    /// Disjoint union; vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &NKGraph) -> Result<NKGraph> {
        let n = self.adj.len();
        if n + other.adj.len() > MAX_VERTICES {
            return Err(Error::SizeLimit("union too large".into()));
        }
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|&r| r << n));
        Ok(NKGraph { adj, inputs: self.inputs | other.inputs << n })
    }

    /// Same graph with a different set of input vertices.
    pub fn with_inputs(&self, inputs: &[usize]) -> Result<NKGraph> {
        Self::new(self.adj.clone(), inputs)
    }
}

/// Local complementation on raw adjacency rows.
pub(crate) fn local_complement_rows(adj: &mut [u32], v: usize) {
    let nb = adj[v];
    for u in bits_of(nb) {
        adj[u] ^= nb & !(1 << u);
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn bits_of(mut m: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig7() -> NKGraph {
        NKGraph::from_json(crate::fixtures::GRAPH_TO_CIRCUIT).unwrap()
    }

    #[test]
    fn triangle_local_complement_gives_path() {
        let g = NKGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)], &[]).unwrap();
        let h = g.local_complement(0).unwrap();
        assert_eq!(h.edges(), vec![(0, 1), (0, 2)]);
        assert_eq!(h.local_complement(0).unwrap(), g);
    }

    #[test]
    fn isolated_vertex_local_complement() {
        let g = NKGraph::from_edges(3, &[(0, 1)], &[]).unwrap();
        assert_eq!(g.local_complement(2).unwrap(), g);
        assert!(g.local_complement(3).is_err());
    }

    #[test]
    fn edge_flip_rules() {
        let g = NKGraph::from_edges(4, &[(0, 1), (1, 2)], &[2, 3]).unwrap();
        let h = g.edge_flip(2, 3).unwrap();
        assert!(h.has_edge(2, 3));
        assert_eq!(h.edge_flip(2, 3).unwrap(), g);
        assert!(g.edge_flip(0, 1).is_err());
        assert!(g.edge_flip(0, 2).is_err());
    }

    #[test]
    fn permutation_partition_check() {
        let g = NKGraph::from_edges(3, &[(0, 2), (1, 2)], &[2]).unwrap();
        assert_eq!(g.apply_nk_permutation(&[0, 1, 2]).unwrap(), g);
        assert!(g.apply_nk_permutation(&[2, 1, 0]).is_err());
        let h = g.apply_nk_permutation(&[1, 0, 2]).unwrap();
        assert_eq!(h.edges(), g.edges());
    }

    #[test]
    fn fig7_codewords() {
        let g = fig7();
        let a = g.codeword_generators(&g.natural_labeling());
        assert_eq!(a.rows, vec![0b1101, 0b0110]);
        assert!(g.is_valid_labeling(&g.natural_labeling()));
        assert_eq!(g.find_valid_labeling().unwrap(), g.natural_labeling());
    }

    #[test]
    fn swapped_outputs_are_not_a_valid_labeling() {
        let g = fig7();
        let l = Labeling { output_order: vec![0, 3, 2, 1] };
        assert!(!g.is_valid_labeling(&l));
        let a = g.codeword_generators(&l).rref();
        assert_eq!(a.matrix.rows, vec![0b1011, 0b1100]);
        assert_eq!(a.pivots, vec![0, 2]);
    }

    #[test]
    fn dependent_inputs_are_rejected() {
        let g = NKGraph::from_json(crate::fixtures::DEPENDENT_INPUTS).unwrap();
        let a = g.codeword_generators(&g.natural_labeling());
        assert_eq!(a.rows[0], a.rows[1]);
        assert!(!g.is_valid_code());
        assert!(matches!(g.find_valid_labeling(), Err(Error::InvalidCode(_))));
    }

    #[test]
    fn four_two_two_is_valid() {
        let g = NKGraph::from_json(crate::fixtures::FOUR_TWO_TWO).unwrap();
        assert!(g.is_valid_code());
        assert!(NKGraph::from_edges(3, &[(0, 1)], &[]).unwrap().is_valid_code());
    }

    #[test]
    fn extension_counts() {
        let g = NKGraph::new(vec![0], &[]).unwrap();
        assert_eq!(g.extend(ExtensionKind::OutputExtension).unwrap().len(), 1);
        let base = NKGraph::from_json(crate::fixtures::EXTENSION_BASE).unwrap();
        assert_eq!(base.extend(ExtensionKind::OutputExtension).unwrap().len(), 63);
        let ins = base.extend(ExtensionKind::InputExtension).unwrap();
        assert_eq!(ins.len(), 15);
        assert!(ins.iter().all(|h| h.k_in() == 3 && h.neighbors(6) & h.input_mask() == 0));
    }

    #[test]
    fn input_without_output_neighbours_gives_zero_row() {
        let g = NKGraph::from_edges(3, &[(0, 1)], &[2]).unwrap();
        assert_eq!(g.codeword_generators(&g.natural_labeling()).rows, vec![0]);
    }
}
