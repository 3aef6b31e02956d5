//! Canonical labeling of small vertex-coloured graphs.
//!
//! Individualization-refinement: refine an ordered partition to an equitable
//! one, branch on the vertices of the first smallest non-singleton cell, and
//! keep the lexicographically smallest relabelled adjacency among the leaves.
//! Automorphisms found between equal leaves prune sibling branches.

/// Canonical relabelling of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canon {
    /// `order[p]` is the original vertex placed at canonical position `p`.
    pub order: Vec<usize>,
    /// Adjacency rows in canonical labels; equal certificates mean isomorphic graphs.
    pub cert: Vec<u32>,
}

/// Canonical form of `adj` with the ordered initial colour classes `cells`.
///
/// Every vertex must appear in exactly one cell. Isomorphisms are required to
/// map each cell onto the cell at the same position.
pub fn canonical_form(adj: &[u32], cells: &[Vec<usize>]) -> Canon {
    let n = adj.len();
    if n == 0 {
        return Canon { order: vec![], cert: vec![] };
    }
    let cells: Vec<Vec<usize>> = cells.iter().filter(|c| !c.is_empty()).cloned().collect();
    debug_assert_eq!(cells.iter().map(Vec::len).sum::<usize>(), n);
    let mut search = Search { adj, best: None, first: None, auts: Vec::new() };
    let mut prefix = Vec::new();
    search.visit(cells, &mut prefix);
    let (cert, order) = search.best.expect("at least one leaf");
    Canon { order, cert }
}

/// Canonical form treating all vertices alike.
pub fn canonical_form_uncoloured(adj: &[u32]) -> Canon {
    canonical_form(adj, &[(0..adj.len()).collect()])
}

/// Relabel adjacency rows so that vertex `order[p]` becomes `p`.
pub fn permuted_rows(adj: &[u32], order: &[usize]) -> Vec<u32> {
    order
        .iter()
        .map(|&v| {
            order
                .iter()
                .enumerate()
                .fold(0u32, |acc, (q, &w)| acc | (((adj[v] >> w) & 1) << q))
        })
        .collect()
}

const MAX_STORED_AUTOMORPHISMS: usize = 256;

struct Search<'a> {
    adj: &'a [u32],
    best: Option<(Vec<u32>, Vec<usize>)>,
    first: Option<(Vec<u32>, Vec<usize>)>,
    auts: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn visit(&mut self, cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
        let cells = refine(self.adj, cells);
        let Some(target) = target_cell(&cells) else {
            self.leaf(cells.iter().map(|c| c[0]).collect());
            return;
        };
        let mut candidates = cells[target].clone();
        candidates.sort_unstable();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &candidates {
            if !tried.is_empty() {
                let orbits = self.stabilizer_orbits(prefix);
                if tried.iter().any(|&u| orbits.same(u, v)) {
                    continue;
                }
            }
            tried.push(v);
            let mut next = Vec::with_capacity(cells.len() + 1);
            for (i, c) in cells.iter().enumerate() {
                if i == target {
                    next.push(vec![v]);
                    next.push(c.iter().copied().filter(|&w| w != v).collect());
                } else {
                    next.push(c.clone());
                }
            }
            prefix.push(v);
            self.visit(next, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let code = permuted_rows(self.adj, &order);
        match &self.first {
            None => self.first = Some((code.clone(), order.clone())),
            Some((c, o)) if *c == code => {
                let aut = automorphism(o, &order);
                self.store(aut);
            }
            _ => {}
        }
        match &self.best {
            None => self.best = Some((code, order)),
            Some((c, o)) => {
                if code < *c {
                    self.best = Some((code, order));
                } else if code == *c {
                    let aut = automorphism(o, &order);
                    self.store(aut);
                }
            }
        }
    }

    fn store(&mut self, aut: Vec<usize>) {
        if aut.iter().enumerate().all(|(i, &a)| i == a) {
            return;
        }
        if self.auts.len() < MAX_STORED_AUTOMORPHISMS && !self.auts.contains(&aut) {
            self.auts.push(aut);
        }
    }

    fn stabilizer_orbits(&self, prefix: &[usize]) -> UnionFind {
        let mut uf = UnionFind::new(self.adj.len());
        for aut in &self.auts {
            if prefix.iter().all(|&p| aut[p] == p) {
                for (v, &w) in aut.iter().enumerate() {
                    uf.union(v, w);
                }
            }
        }
        uf
    }
}

/// Map sending `a[p]` to `b[p]`.
fn automorphism(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut aut = vec![0; a.len()];
    for (&x, &y) in a.iter().zip(b) {
        aut[x] = y;
    }
    aut
}

fn target_cell(cells: &[Vec<usize>]) -> Option<usize> {
    cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i)
}

/// Split cells by neighbour counts into each cell until the partition is equitable.
fn refine(adj: &[u32], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let mut s = 0;
    while s < cells.len() {
        let splitter = cells[s].iter().fold(0u32, |m, &v| m | 1 << v);
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        for c in &cells {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut keyed: Vec<(u32, usize)> =
                c.iter().map(|&v| ((adj[v] & splitter).count_ones(), v)).collect();
            keyed.sort_unstable();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|&(_, v)| v).collect());
                    start = i;
                }
            }
        }
        if next.len() > cells.len() {
            cells = next;
            s = 0;
        } else {
            s += 1;
        }
    }
    cells
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn same(&self, a: usize, b: usize) -> bool {
        let root = |mut x: usize| {
            while self.parent[x] != x {
                x = self.parent[x];
            }
            x
        };
        root(a) == root(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn relabel(adj: &[u32], perm: &[usize]) -> Vec<u32> {
        let mut out = vec![0u32; adj.len()];
        for v in 0..adj.len() {
            for w in 0..adj.len() {
                if adj[v] >> w & 1 == 1 {
                    out[perm[v]] |= 1 << perm[w];
                }
            }
        }
        out
    }

    fn random_graph(n: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
        use rand::Rng;
        let mut adj = vec![0u32; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.4) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        adj
    }

    #[test]
    fn invariant_under_relabelling() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=12 {
            for _ in 0..20 {
                let adj = random_graph(n, &mut rng);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                let a = canonical_form_uncoloured(&adj);
                let b = canonical_form_uncoloured(&relabel(&adj, &perm));
                assert_eq!(a.cert, b.cert);
                assert_eq!(permuted_rows(&adj, &a.order), a.cert);
            }
        }
    }

    #[test]
    fn symmetric_graphs_are_fast_and_consistent() {
        let empty = vec![0u32; 16];
        assert_eq!(canonical_form_uncoloured(&empty).cert, empty);
        let full: Vec<u32> = (0..16).map(|i| 0xffff & !(1 << i)).collect();
        assert_eq!(canonical_form_uncoloured(&full).cert, full);
    }

    #[test]
    fn distinguishes_non_isomorphic() {
        // star and path on four vertices
        let star = vec![0b1110, 0b0001, 0b0001, 0b0001];
        let path = vec![0b0010, 0b0101, 0b1010, 0b0100];
        assert_ne!(canonical_form_uncoloured(&star).cert, canonical_form_uncoloured(&path).cert);
    }

    #[test]
    fn colours_are_respected() {
        // edge 0-1 with vertex 2 isolated; colour {0} vs {2} differ
        let adj = vec![0b010, 0b001, 0b000];
        let a = canonical_form(&adj, &[vec![1, 2], vec![0]]);
        let b = canonical_form(&adj, &[vec![0, 1], vec![2]]);
        assert_ne!(a.cert, b.cert);
    }

    #[test]
    fn brute_force_agrees_on_small_graphs() {
        // all graphs on 5 vertices: canonical classes must number 34
        let n = 5;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut certs = std::collections::HashSet::new();
        for m in 0u32..(1 << pairs.len()) {
            let mut adj = vec![0u32; n];
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if m >> b & 1 == 1 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
            certs.insert(canonical_form_uncoloured(&adj).cert);
        }
        assert_eq!(certs.len(), 34);
    }
}
