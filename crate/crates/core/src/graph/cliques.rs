//! Maximal clique enumeration (Bron–Kerbosch with Tomita pivoting) on
//! bitset adjacency.

use std::collections::BTreeMap;

use super::matrix::CoQualGraph;
use crate::corpus::DisciplineCode;

type Bits = Vec<u64>;

/// Dense bitset adjacency of an undirected simple graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    words: usize,
    rows: Vec<Bits>,
}

impl Adjacency {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Adjacency {
            n,
            words,
            rows: vec![vec![0; words]; n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = Adjacency::new(n);
        for (a, b) in edges {
            adj.add_edge(a, b);
        }
        adj
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "self-loops are not allowed");
        self.rows[a][b / 64] |= 1 << (b % 64);
        self.rows[b][a / 64] |= 1 << (a % 64);
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.rows[a][b / 64] & (1 << (b % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

fn count(b: &[u64]) -> u32 {
    b.iter().map(|w| w.count_ones()).sum()
}

fn is_zero(b: &[u64]) -> bool {
    b.iter().all(|w| *w == 0)
}

fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn ones(b: &[u64]) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(w, &word)| {
        let mut word = word;
        std::iter::from_fn(move || {
            if word == 0 {
                return None;
            }
            let bit = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(w * 64 + bit)
        })
    })
}

fn expand(adj: &Adjacency, r: &mut Vec<usize>, mut p: Bits, mut x: Bits, out: &mut Vec<Vec<usize>>) {
    if is_zero(&p) {
        if is_zero(&x) {
            out.push(r.clone());
        }
        return;
    }
    // pivot from P ∪ X maximizing |P ∩ N(u)|
    let pivot = ones(&p)
        .chain(ones(&x))
        .max_by_key(|&u| (count(&and(&p, &adj.rows[u])), std::cmp::Reverse(u)))
        .expect("P is non-empty");
    let candidates: Vec<usize> = ones(&p).filter(|&v| !adj.is_adjacent(pivot, v)).collect();
    for v in candidates {
        let nv = &adj.rows[v];
        r.push(v);
        expand(adj, r, and(&p, nv), and(&x, nv), out);
        r.pop();
        p[v / 64] &= !(1 << (v % 64));
        x[v / 64] |= 1 << (v % 64);
    }
}

/// All maximal cliques as sorted index lists, ordered by size descending
/// then lexicographically. Isolated vertices are maximal cliques of size 1.
pub fn maximal_cliques_of(adj: &Adjacency) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if adj.n == 0 {
        return out;
    }
    let mut p = vec![0u64; adj.words];
    for v in 0..adj.n {
        p[v / 64] |= 1 << (v % 64);
    }
    expand(adj, &mut Vec::new(), p, vec![0; adj.words], &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

/// Maximal cliques of the co-qualification graph, as discipline codes.
pub fn maximal_cliques(g: &CoQualGraph) -> Vec<Vec<DisciplineCode>> {
    let adj = Adjacency::from_edges(g.nodes.len(), g.edges.iter().map(|e| (e.i, e.j)));
    // node order follows code order, so index order is code order
    maximal_cliques_of(&adj)
        .into_iter()
        .map(|c| c.into_iter().map(|i| g.nodes[i].code).collect())
        .collect()
}

pub fn clique_size_histogram<T>(cliques: &[Vec<T>]) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for c in cliques {
        *h.entry(c.len()).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_path() {
        let tri = Adjacency::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(maximal_cliques_of(&tri), vec![vec![0, 1, 2]]);
        let path = Adjacency::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]);
        let c = maximal_cliques_of(&path);
        assert_eq!(c, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]]);
        assert_eq!(clique_size_histogram(&c), BTreeMap::from([(2, 4)]));
    }

    #[test]
    fn isolated_vertices_and_empty_graph() {
        let g = Adjacency::from_edges(4, [(0, 1)]);
        assert_eq!(maximal_cliques_of(&g), vec![vec![0, 1], vec![2], vec![3]]);
        assert!(maximal_cliques_of(&Adjacency::new(0)).is_empty());
    }

    #[test]
    fn works_past_one_word() {
        // two disjoint 40-cliques spanning word boundaries
        let mut adj = Adjacency::new(80);
        for block in [0..40, 40..80] {
            for a in block.clone() {
                for b in a + 1..block.end {
                    adj.add_edge(a, b);
                }
            }
        }
        adj.add_edge(39, 40);
        let c = maximal_cliques_of(&adj);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0], (0..40).collect::<Vec<_>>());
        assert_eq!(c[1], (40..80).collect::<Vec<_>>());
        assert_eq!(c[2], vec![39, 40]);
    }
}
