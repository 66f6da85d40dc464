//! Random generators and brute-force oracles shared by the integration
//! tests. Nothing here calls into the code paths it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use rand::seq::SliceRandom;
use rand::Rng;
use wlaudit_core::Graph;

pub fn gnp<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::build(n, edges, None).unwrap()
}

pub fn gnp_labeled<R: Rng>(rng: &mut R, n: usize, p: f64, label_values: u32) -> Graph {
    let g = gnp(rng, n, p);
    let labels = (0..n).map(|_| rng.gen_range(0..label_values)).collect();
    relabel(&g, Some(labels))
}

pub fn relabel(g: &Graph, labels: Option<Vec<u32>>) -> Graph {
    let edges = g.edges().iter().map(|&(u, v)| (u as usize, v as usize));
    Graph::build(g.node_count(), edges, labels).unwrap()
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Uniform random labelled tree on `n >= 2` nodes from a Prüfer sequence.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Graph {
    assert!(n >= 2);
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    Graph::build(n, edges, None).unwrap()
}

fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        m[u as usize][v as usize] = true;
        m[v as usize][u as usize] = true;
    }
    m
}

/// Tries every permutation of `g`'s nodes.
pub fn brute_isomorphic(g: &Graph, h: &Graph, use_labels: bool) -> bool {
    let n = g.node_count();
    if n != h.node_count() || g.edge_count() != h.edge_count() {
        return false;
    }
    let a = adjacency_matrix(g);
    let b = adjacency_matrix(h);
    let la = g.node_labels().map(<[u32]>::to_vec);
    let lb = h.node_labels().map(<[u32]>::to_vec);
    let mut perm: Vec<usize> = (0..n).collect();
    let ok = |p: &[usize]| {
        if use_labels {
            let (la, lb) = (la.as_ref().unwrap(), lb.as_ref().unwrap());
            if (0..n).any(|v| la[v] != lb[p[v]]) {
                return false;
            }
        }
        (0..n).all(|u| (u + 1..n).all(|v| a[u][v] == b[p[u]][p[v]]))
    };
    // Heap's algorithm
    if ok(&perm) {
        return true;
    }
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if ok(&perm) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

/// Induced connected graphlet counts by checking every vertex subset of
/// size 3 and 4. Keys: "p3", "triangle", "p4", "claw", "c4", "paw",
/// "diamond", "k4".
pub fn brute_motifs(g: &Graph) -> BTreeMap<&'static str, u64> {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let mut out: BTreeMap<&'static str, u64> = BTreeMap::new();
    for name in ["p3", "triangle", "p4", "claw", "c4", "paw", "diamond", "k4"] {
        out.insert(name, 0);
    }
    for mask in 0u32..(1 << n) {
        let nodes: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        if nodes.len() < 3 || nodes.len() > 4 {
            continue;
        }
        // connectivity by flood fill inside the subset
        let mut seen = vec![nodes[0]];
        let mut frontier = vec![nodes[0]];
        while let Some(x) = frontier.pop() {
            for &y in &nodes {
                if a[x][y] && !seen.contains(&y) {
                    seen.push(y);
                    frontier.push(y);
                }
            }
        }
        if seen.len() != nodes.len() {
            continue;
        }
        let mut degrees: Vec<usize> = nodes
            .iter()
            .map(|&x| nodes.iter().filter(|&&y| a[x][y]).count())
            .collect();
        degrees.sort_unstable();
        let edges = degrees.iter().sum::<usize>() / 2;
        let name = match (nodes.len(), edges, degrees.as_slice()) {
            (3, 2, _) => "p3",
            (3, 3, _) => "triangle",
            (4, 3, [1, 1, 1, 3]) => "claw",
            (4, 3, _) => "p4",
            (4, 4, [2, 2, 2, 2]) => "c4",
            (4, 4, _) => "paw",
            (4, 5, _) => "diamond",
            (4, 6, _) => "k4",
            other => panic!("unexpected subset shape {other:?}"),
        };
        *out.get_mut(name).unwrap() += 1;
    }
    out
}

/// Number of triangles as trace(A^3) / 6.
pub fn trace_triangles(g: &Graph) -> u64 {
    let n = g.node_count();
    let a = adjacency_matrix(g);
    let m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&b| b as u64).collect()).collect();
    let mut a2 = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if m[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                a2[i][j] += m[k][j];
            }
        }
    }
    let mut trace = 0;
    for i in 0..n {
        for k in 0..n {
            trace += a2[i][k] * m[k][i];
        }
    }
    trace / 6
}

/// Best accuracy over every assignment of one class per key group, found by
/// enumerating all `classes^groups` assignments.
pub fn brute_upper_bound<K: Hash + Eq + Clone>(keys: &[K], labels: &[u32], classes: u32) -> f64 {
    let mut group_of: HashMap<K, usize> = HashMap::new();
    let ids: Vec<usize> = keys
        .iter()
        .map(|k| {
            let next = group_of.len();
            *group_of.entry(k.clone()).or_insert(next)
        })
        .collect();
    let groups = group_of.len() as u32;
    let total = (classes as u64).pow(groups);
    let mut best = 0;
    for code in 0..total {
        let mut assignment = Vec::with_capacity(groups as usize);
        let mut c = code;
        for _ in 0..groups {
            assignment.push((c % classes as u64) as u32);
            c /= classes as u64;
        }
        let correct = ids
            .iter()
            .zip(labels)
            .filter(|&(&g, &l)| assignment[g] == l)
            .count();
        best = best.max(correct);
    }
    100.0 * best as f64 / keys.len() as f64
}

/// AHU canonical string of a free tree, rooted at its center(s).
pub fn tree_canonical(g: &Graph) -> String {
    let n = g.node_count();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&u| u as usize).collect())
        .collect();
    // peel leaves to find the center
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &u in &adj[leaf] {
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    fn encode(v: usize, parent: usize, adj: &[Vec<usize>]) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&u| u != parent)
            .map(|&u| encode(u, v, adj))
            .collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    let mut codes: Vec<String> = layer.iter().map(|&c| encode(c, usize::MAX, &adj)).collect();
    codes.sort();
    codes.swap_remove(0)
}
