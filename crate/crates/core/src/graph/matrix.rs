use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{ApplicantKey, Application, DisciplineCode, DisciplineTable, Outcome};

/// Which disciplines become rows of the matrix.
#[derive(Debug, Clone, Copy)]
pub enum NodeUniverse<'a> {
    /// Disciplines that appear in the application list, whatever the outcome.
    Observed,
    /// Every discipline of the table, including ones with no applications.
    Full(&'a DisciplineTable),
}

/// Symmetric co-qualification strengths; the diagonal is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct CoQualMatrix {
    pub disciplines: Vec<DisciplineCode>,
    values: Vec<f64>,
}

impl CoQualMatrix {
    pub fn len(&self) -> usize {
        self.disciplines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disciplines.is_empty()
    }

    /// `M_ij`, or `None` on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        (i != j).then(|| self.values[i * self.len() + j])
    }

    pub fn index_of(&self, code: &DisciplineCode) -> Option<usize> {
        self.disciplines.binary_search(code).ok()
    }

    /// Off-diagonal entries with `i < j`.
    pub fn upper_triangle(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j, self.values[i * n + j])))
    }
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// `M_ij = |Q_i ∩ Q_j| / |Q_i ∪ Q_j|` where `Q_i` is the set of applicants
/// qualified in discipline `i` under either role. Empty unions give 0.
pub fn co_qualification_matrix<'a>(
    applications: impl IntoIterator<Item = &'a Application>,
    universe: NodeUniverse<'_>,
) -> CoQualMatrix {
    let mut qualified: BTreeMap<DisciplineCode, BTreeSet<&'a ApplicantKey>> = BTreeMap::new();
    let mut people: BTreeSet<&'a ApplicantKey> = BTreeSet::new();
    for app in applications {
        let set = qualified.entry(app.discipline).or_default();
        if app.outcome == Outcome::Qualified {
            set.insert(&app.applicant_ref);
            people.insert(&app.applicant_ref);
        }
    }
    let disciplines: Vec<DisciplineCode> = match universe {
        NodeUniverse::Observed => qualified.keys().copied().collect(),
        NodeUniverse::Full(table) => table.iter().map(|d| d.code).collect(),
    };
    // applicant keys -> dense ids so set algebra runs on sorted integer lists
    let ids: BTreeMap<&ApplicantKey, usize> = people.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
    let members: Vec<Vec<usize>> = disciplines
        .iter()
        .map(|d| {
            qualified
                .get(d)
                .map(|s| s.iter().map(|k| ids[k]).collect())
                .unwrap_or_default()
        })
        .collect();

    let n = disciplines.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return 0.0;
                    }
                    let inter = sorted_intersection_len(&members[i], &members[j]);
                    let union = members[i].len() + members[j].len() - inter;
                    if union == 0 {
                        0.0
                    } else {
                        inter as f64 / union as f64
                    }
                })
                .collect()
        })
        .collect();
    CoQualMatrix {
        disciplines,
        values: rows.concat(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub code: DisciplineCode,
    pub area_id: u8,
    pub degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Weighted undirected graph with an edge wherever `M_ij > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoQualGraph {
    pub nodes: Vec<Node>,
    /// Sorted by `(i, j)` with `i < j`.
    pub edges: Vec<Edge>,
}

impl CoQualGraph {
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        adj
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search_by(|e| (e.i, e.j).cmp(&(i, j))).is_ok()
    }
}

pub fn build_graph(m: &CoQualMatrix) -> CoQualGraph {
    let edges: Vec<Edge> = m
        .upper_triangle()
        .filter(|(_, _, w)| *w > 0.0)
        .map(|(i, j, weight)| Edge { i, j, weight })
        .collect();
    let mut degree = vec![0; m.len()];
    for e in &edges {
        degree[e.i] += 1;
        degree[e.j] += 1;
    }
    let nodes = m
        .disciplines
        .iter()
        .zip(degree)
        .map(|(code, degree)| Node {
            code: *code,
            area_id: code.area_id(),
            degree,
        })
        .collect();
    CoQualGraph { nodes, edges }
}

/// Nodes by degree descending, ties by code ascending; the first `n`.
pub fn top_hubs(g: &CoQualGraph, n: usize) -> Vec<(DisciplineCode, usize)> {
    let mut v: Vec<(DisciplineCode, usize)> = g.nodes.iter().map(|n| (n.code, n.degree)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.truncate(n);
    v
}
