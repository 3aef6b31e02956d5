//! Edge colourings of gate-interaction graphs: Misra–Gries and exact chromatic index.

use std::collections::BTreeSet;

/// Edge colouring; `colors[i]` belongs to `edges[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub colors: Vec<usize>,
    pub num_colors: usize,
}

fn max_degree(num_vertices: usize, edges: &[(usize, usize)]) -> usize {
    let mut deg = vec![0usize; num_vertices];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

fn vertices(edges: &[(usize, usize)]) -> usize {
    edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0)
}

pub fn is_simple(edges: &[(usize, usize)]) -> bool {
    let mut seen = BTreeSet::new();
    edges.iter().all(|&(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
}

/// True when no two edges sharing a vertex have the same colour.
pub fn is_proper(edges: &[(usize, usize)], colors: &[usize]) -> bool {
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (a, b) = edges[i];
            let (c, d) = edges[j];
            if colors[i] == colors[j] && (a == c || a == d || b == c || b == d) {
                return false;
            }
        }
    }
    true
}

/// Misra–Gries colouring of a simple graph with at most `Δ + 1` colours.
/// Multigraphs fall back to a greedy colouring.
pub fn misra_gries(edges: &[(usize, usize)]) -> EdgeColoring {
    let n = vertices(edges);
    if !is_simple(edges) {
        return greedy(edges);
    }
    let delta = max_degree(n, edges);
    let palette = delta + 1;
    // color_at[u][v] = colour of edge (u, v) if coloured
    let mut color_at: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let free = |color_at: &Vec<Vec<Option<usize>>>, x: usize, c: usize| adj[x].iter().all(|&y| color_at[x][y] != Some(c));
    let first_free = |color_at: &Vec<Vec<Option<usize>>>, x: usize| {
        (0..palette).find(|&c| free(color_at, x, c)).expect("Δ + 1 colours leave one free")
    };
    for &(u, v) in edges {
        // maximal fan of u starting at v
        let mut fan = vec![v];
        loop {
            let last = *fan.last().expect("fan is non-empty");
            let next = adj[u].iter().copied().find(|&x| {
                !fan.contains(&x)
                    && color_at[u][x].is_some_and(|c| free(&color_at, last, c))
            });
            match next {
                Some(x) => fan.push(x),
                None => break,
            }
        }
        let c = first_free(&color_at, u);
        let d = first_free(&color_at, *fan.last().expect("fan is non-empty"));
        // invert the cd-path starting at u
        if c != d {
            let mut path = vec![u];
            let mut want = d;
            let mut cur = u;
            loop {
                let next = adj[cur].iter().copied().find(|&y| color_at[cur][y] == Some(want) && !path.contains(&y));
                match next {
                    Some(y) => {
                        path.push(y);
                        cur = y;
                        want = if want == d { c } else { d };
                    }
                    None => break,
                }
            }
            for w in path.windows(2) {
                let (a, b) = (w[0], w[1]);
                let old = color_at[a][b].expect("path edges are coloured");
                let new = if old == c { d } else { c };
                color_at[a][b] = Some(new);
                color_at[b][a] = Some(new);
            }
        }
        // find w in the fan with d free, such that the prefix is still a fan
        let mut end = 0;
        for (i, &x) in fan.iter().enumerate() {
            if i > 0 {
                let prev = fan[i - 1];
                let ok = color_at[u][x].is_some_and(|col| free(&color_at, prev, col));
                if !ok {
                    break;
                }
            }
            if free(&color_at, x, d) {
                end = i;
                break;
            }
        }
        // rotate the fan prefix
        for i in 0..end {
            let col = color_at[u][fan[i + 1]];
            color_at[u][fan[i]] = col;
            color_at[fan[i]][u] = col;
        }
        let w = fan[end];
        color_at[u][w] = Some(d);
        color_at[w][u] = Some(d);
    }
    let colors: Vec<usize> = edges.iter().map(|&(u, v)| color_at[u][v].expect("all edges coloured")).collect();
    let num_colors = colors.iter().copied().collect::<BTreeSet<_>>().len();
    EdgeColoring { colors: compact(&colors), num_colors }
}

fn compact(colors: &[usize]) -> Vec<usize> {
    let used: Vec<usize> = colors.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    colors.iter().map(|c| used.binary_search(c).expect("colour present")).collect()
}

/// First-fit colouring in edge order.
pub fn greedy(edges: &[(usize, usize)]) -> EdgeColoring {
    let mut colors: Vec<usize> = Vec::with_capacity(edges.len());
    for (i, &(u, v)) in edges.iter().enumerate() {
        let taken: BTreeSet<usize> = edges[..i]
            .iter()
            .zip(&colors)
            .filter(|(&(a, b), _)| a == u || a == v || b == u || b == v)
            .map(|(_, &c)| c)
            .collect();
        colors.push((0..).find(|c| !taken.contains(c)).expect("unbounded range"));
    }
    let num_colors = colors.iter().max().map_or(0, |m| m + 1);
    EdgeColoring { colors, num_colors }
}

/// Edge sets up to this size are coloured exactly by [`edge_chromatic_depth`].
pub const EXACT_COLORING_LIMIT: usize = 30;

/// Exact chromatic index for small edge sets, Misra–Gries colour count otherwise.
pub fn edge_chromatic_depth(edges: &[(usize, usize)]) -> usize {
    if edges.len() <= EXACT_COLORING_LIMIT {
        chromatic_index(edges)
    } else {
        misra_gries(edges).num_colors
    }
}

/// Exact chromatic index by backtracking; intended for a few dozen edges.
pub fn chromatic_index(edges: &[(usize, usize)]) -> usize {
    if edges.is_empty() {
        return 0;
    }
    let n = vertices(edges);
    let lower = max_degree(n, edges);
    let upper = misra_gries(edges).num_colors;
    for k in lower..upper {
        if colorable(edges, n, k) {
            return k;
        }
    }
    upper
}

fn colorable(edges: &[(usize, usize)], n: usize, k: usize) -> bool {
    // `opened` colours are in use; all unopened colours are interchangeable
    fn go(i: usize, edges: &[(usize, usize)], used: &mut [u64], k: usize, opened: usize) -> bool {
        if i == edges.len() {
            return true;
        }
        let (u, v) = edges[i];
        for c in 0..k.min(opened + 1) {
            let bit = 1u64 << c;
            if used[u] & bit == 0 && used[v] & bit == 0 {
                used[u] |= bit;
                used[v] |= bit;
                if go(i + 1, edges, used, k, opened.max(c + 1)) {
                    return true;
                }
                used[u] &= !bit;
                used[v] &= !bit;
            }
        }
        false
    }
    let mut used = vec![0u64; n];
    go(0, edges, &mut used, k, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn triangle_needs_three() {
        let t = [(0, 1), (1, 2), (0, 2)];
        assert_eq!(chromatic_index(&t), 3);
        let c = misra_gries(&t);
        assert!(is_proper(&t, &c.colors));
        assert_eq!(c.num_colors, 3);
    }

    #[test]
    fn even_cycle_and_star() {
        assert_eq!(chromatic_index(&[(0, 1), (1, 2), (2, 3), (3, 0)]), 2);
        assert_eq!(chromatic_index(&[(0, 1), (0, 2), (0, 3)]), 3);
        assert_eq!(chromatic_index(&[]), 0);
    }

    #[test]
    fn petersen_is_class_two() {
        let outer: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let spokes: Vec<(usize, usize)> = (0..5).map(|i| (i, i + 5)).collect();
        let inner: Vec<(usize, usize)> = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5)).collect();
        let e: Vec<_> = outer.into_iter().chain(spokes).chain(inner).collect();
        assert_eq!(chromatic_index(&e), 4);
    }

    #[test]
    fn misra_gries_within_vizing_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.random_range(2..12);
            let mut e = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(0.4) {
                        e.push((i, j));
                    }
                }
            }
            let c = misra_gries(&e);
            assert!(is_proper(&e, &c.colors));
            assert!(c.num_colors <= max_degree(n, &e) + 1);
            let chi = chromatic_index(&e);
            assert!(chi <= c.num_colors);
            assert!(chi >= max_degree(n, &e));
        }
    }
}
