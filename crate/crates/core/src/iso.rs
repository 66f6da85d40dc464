//! Exact isomorphism and the pairwise 1-WL test.
//!
//! The exact matcher refines the disjoint union of both graphs to an
//! equitable coloring, then branches by individualizing one node of `g`
//! against each same-colored node of `h` and refining again. A color whose
//! counts differ between the two sides prunes the branch. Every isomorphism
//! preserves these colors, so pruning never loses a solution.

use std::collections::HashMap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tu::Dataset;
use crate::wl::{self, ColorTable};

/// Default cap on search-tree nodes for one pair.
pub const DEFAULT_ISO_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WlTestResult {
    /// Histograms first differ at `iteration`.
    Distinguished { iteration: usize },
    /// Histograms agree through `iteration`. `stable` is false when the run
    /// stopped at `max_k` before the joint coloring settled.
    Indistinguishable { iteration: usize, stable: bool },
}

impl WlTestResult {
    pub fn is_distinguished(&self) -> bool {
        matches!(self, WlTestResult::Distinguished { .. })
    }
}

/// Runs joint refinement over `g` and `h` with a shared color table.
///
/// Stops at the first differing histogram, or once the partition of the
/// disjoint union stops changing. Stability is judged on the union, since two
/// graphs can each be stable on their own and still split apart on the next
/// step (a 2-regular and a 3-regular graph of equal order at `k = 0`).
pub fn wl_test(g: &Graph, h: &Graph, use_labels: bool, max_k: usize) -> Result<WlTestResult> {
    let mut table = ColorTable::new();
    let mut cg = wl::initial_coloring(g, use_labels, &mut table)?;
    let mut ch = wl::initial_coloring(h, use_labels, &mut table)?;
    let mut classes = joint_class_count(&cg.colors, &ch.colors);
    for k in 0..=max_k {
        if cg.histogram() != ch.histogram() {
            return Ok(WlTestResult::Distinguished { iteration: k });
        }
        if k == max_k {
            break;
        }
        let ng = wl::refine_step(g, &cg, &mut table);
        let nh = wl::refine_step(h, &ch, &mut table);
        let next_classes = joint_class_count(&ng.colors, &nh.colors);
        if next_classes == classes && ng.histogram() == nh.histogram() {
            return Ok(WlTestResult::Indistinguishable {
                iteration: k,
                stable: true,
            });
        }
        cg = ng;
        ch = nh;
        classes = next_classes;
    }
    Ok(WlTestResult::Indistinguishable {
        iteration: max_k,
        stable: false,
    })
}

fn joint_class_count(a: &[u32], b: &[u32]) -> usize {
    let mut all: Vec<u32> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

#[derive(Debug, Clone, Copy)]
pub struct IsoOptions {
    pub use_labels: bool,
    pub budget: u64,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions {
            use_labels: false,
            budget: DEFAULT_ISO_BUDGET,
        }
    }
}

/// Returns `Some(mapping)` with `mapping[v]` = image of `g`'s node `v` in `h`
/// when the graphs are isomorphic (label-preserving if `use_labels`).
pub fn find_isomorphism(g: &Graph, h: &Graph, opts: IsoOptions) -> Result<Option<Vec<usize>>> {
    if opts.use_labels {
        for x in [g, h] {
            if !x.has_labels() {
                return Err(Error::MissingLabels(x.graph_id().to_string()));
            }
        }
    }
    if g.node_count() != h.node_count()
        || g.edge_count() != h.edge_count()
        || g.degree_sequence() != h.degree_sequence()
    {
        return Ok(None);
    }
    if opts.use_labels {
        let mut lg = g.node_labels().unwrap().to_vec();
        let mut lh = h.node_labels().unwrap().to_vec();
        lg.sort_unstable();
        lh.sort_unstable();
        if lg != lh {
            return Ok(None);
        }
    }
    let mut search = UnionSearch::new(g, h, opts.use_labels);
    let mut colors = search.initial_colors();
    if !search.refine(&mut colors) {
        return Ok(None);
    }
    let mut expanded = 0u64;
    search.descend(colors, &mut expanded, opts.budget)
}

pub fn exact_isomorphic(g: &Graph, h: &Graph, opts: IsoOptions) -> Result<bool> {
    Ok(find_isomorphism(g, h, opts)?.is_some())
}

/// Checks that `mapping` is an edge- and (optionally) label-preserving
/// bijection from `g` onto `h`.
pub fn is_valid_isomorphism(g: &Graph, h: &Graph, mapping: &[usize], use_labels: bool) -> bool {
    let n = g.node_count();
    if h.node_count() != n || mapping.len() != n || g.edge_count() != h.edge_count() {
        return false;
    }
    let mut hit = vec![false; n];
    for &w in mapping {
        if w >= n || hit[w] {
            return false;
        }
        hit[w] = true;
    }
    if use_labels {
        match (g.node_labels(), h.node_labels()) {
            (Some(lg), Some(lh)) => {
                if (0..n).any(|v| lg[v] != lh[mapping[v]]) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    g.edges()
        .iter()
        .all(|&(u, v)| h.has_edge(mapping[u as usize], mapping[v as usize]))
}

/// Disjoint union of `g` (nodes `0..n`) and `h` (nodes `n..2n`).
struct UnionSearch<'a> {
    g: &'a Graph,
    h: &'a Graph,
    n: usize,
    use_labels: bool,
}

impl<'a> UnionSearch<'a> {
    fn new(g: &'a Graph, h: &'a Graph, use_labels: bool) -> Self {
        UnionSearch {
            g,
            h,
            n: g.node_count(),
            use_labels,
        }
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let (graph, offset, local) = if v < self.n {
            (self.g, 0, v)
        } else {
            (self.h, self.n, v - self.n)
        };
        graph
            .neighbors(local)
            .iter()
            .map(move |&u| u as usize + offset)
    }

    fn initial_colors(&self) -> Vec<u32> {
        if !self.use_labels {
            return vec![0; 2 * self.n];
        }
        let mut ids: FxHashMap<u32, u32> = FxHashMap::default();
        let mut labels: Vec<u32> = self.g.node_labels().unwrap().to_vec();
        labels.extend_from_slice(self.h.node_labels().unwrap());
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for (i, l) in sorted.into_iter().enumerate() {
            ids.insert(l, i as u32);
        }
        labels.iter().map(|l| ids[l]).collect()
    }

    /// Refines to an equitable coloring. Returns false as soon as some color
    /// occurs a different number of times on the two sides.
    fn refine(&self, colors: &mut Vec<u32>) -> bool {
        let total = 2 * self.n;
        let mut classes = distinct(colors);
        let mut key: Vec<u32> = Vec::new();
        loop {
            if !self.balanced(colors) {
                return false;
            }
            let mut ids: FxHashMap<Vec<u32>, u32> = FxHashMap::default();
            // Ids are assigned in sorted key order so that both sides see
            // the same numbering regardless of node order.
            let mut keys: Vec<Vec<u32>> = Vec::with_capacity(total);
            for v in 0..total {
                key.clear();
                key.push(colors[v]);
                key.extend(self.neighbors(v).map(|u| colors[u]));
                key[1..].sort_unstable();
                keys.push(key.clone());
            }
            let mut sorted: Vec<&Vec<u32>> = keys.iter().collect();
            sorted.sort_unstable();
            sorted.dedup();
            for (i, k) in sorted.into_iter().enumerate() {
                ids.insert(k.clone(), i as u32);
            }
            let next: Vec<u32> = keys.iter().map(|k| ids[k]).collect();
            let next_classes = ids.len();
            *colors = next;
            if next_classes == classes {
                return self.balanced(colors);
            }
            classes = next_classes;
        }
    }

    fn balanced(&self, colors: &[u32]) -> bool {
        let mut count: FxHashMap<u32, i64> = FxHashMap::default();
        for &c in &colors[..self.n] {
            *count.entry(c).or_insert(0) += 1;
        }
        for &c in &colors[self.n..] {
            *count.entry(c).or_insert(0) -= 1;
        }
        count.values().all(|&d| d == 0)
    }

    fn descend(
        &mut self,
        colors: Vec<u32>,
        expanded: &mut u64,
        budget: u64,
    ) -> Result<Option<Vec<usize>>> {
        *expanded += 1;
        if *expanded > budget {
            return Err(Error::Timeout { budget, pair: None });
        }
        // smallest non-singleton cell, ties broken by color id
        let mut size: HashMap<u32, usize> = HashMap::new();
        for &c in &colors[..self.n] {
            *size.entry(c).or_insert(0) += 1;
        }
        let target = size
            .iter()
            .filter(|(_, &s)| s > 1)
            .min_by_key(|(&c, &s)| (s, c))
            .map(|(&c, _)| c);

        let Some(cell) = target else {
            let (left, right) = colors.split_at(self.n);
            let at: FxHashMap<u32, usize> = right.iter().enumerate().map(|(w, &c)| (c, w)).collect();
            let mapping: Vec<usize> = left.iter().map(|c| at[c]).collect();
            return Ok(is_valid_isomorphism(self.g, self.h, &mapping, self.use_labels)
                .then_some(mapping));
        };

        let v = (0..self.n).find(|&v| colors[v] == cell).unwrap();
        let fresh = *colors.iter().max().unwrap() + 1;
        let candidates: Vec<usize> = (self.n..2 * self.n).filter(|&w| colors[w] == cell).collect();
        for w in candidates {
            let mut next = colors.clone();
            next[v] = fresh;
            next[w] = fresh;
            if !self.refine(&mut next) {
                continue;
            }
            if let Some(mapping) = self.descend(next, expanded, budget)? {
                return Ok(Some(mapping));
            }
        }
        Ok(None)
    }
}

fn distinct(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Partition of a dataset's graphs into exact-isomorphism classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoClassIndex {
    /// Member graph indices per class, ascending; classes ordered by their
    /// smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Class index of every graph.
    pub class_of: Vec<usize>,
}

impl IsoClassIndex {
    pub fn from_classes(mut classes: Vec<Vec<usize>>, n: usize) -> Self {
        for c in &mut classes {
            c.sort_unstable();
        }
        classes.sort_unstable_by_key(|c| c[0]);
        let mut class_of = vec![usize::MAX; n];
        for (ci, c) in classes.iter().enumerate() {
            for &g in c {
                class_of[g] = ci;
            }
        }
        IsoClassIndex { classes, class_of }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn graph_count(&self) -> usize {
        self.class_of.len()
    }

    /// One member per class, the smallest index.
    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    /// Graphs with no isomorphic duplicate, ascending.
    pub fn unique_graphs(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .classes
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| c[0])
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_unique(&self, graph: usize) -> bool {
        self.classes[self.class_of[graph]].len() == 1
    }
}

pub fn isomorphism_classes(d: &Dataset, opts: IsoOptions) -> Result<IsoClassIndex> {
    classes_of_graphs(&d.graphs, opts)
}

/// Buckets graphs by `(nodes, edges, stable WL signature)` and splits every
/// bucket into exact classes.
pub fn classes_of_graphs(graphs: &[Graph], opts: IsoOptions) -> Result<IsoClassIndex> {
    let mut table = ColorTable::new();
    let stable = wl::stable_signatures(graphs, opts.use_labels, &mut table)?;
    type BucketKey<'a> = (usize, usize, &'a (usize, wl::WlSignature));
    let mut buckets: HashMap<BucketKey, Vec<usize>> = HashMap::new();
    for (i, g) in graphs.iter().enumerate() {
        buckets
            .entry((g.node_count(), g.edge_count(), &stable[i]))
            .or_default()
            .push(i);
    }
    let mut buckets: Vec<Vec<usize>> = buckets.into_values().collect();
    buckets.sort_unstable_by_key(|b| b[0]);

    let split: Vec<Vec<Vec<usize>>> = buckets
        .par_iter()
        .map(|members| split_bucket(graphs, members, opts))
        .collect::<Result<_>>()?;
    Ok(IsoClassIndex::from_classes(
        split.into_iter().flatten().collect(),
        graphs.len(),
    ))
}

fn split_bucket(graphs: &[Graph], members: &[usize], opts: IsoOptions) -> Result<Vec<Vec<usize>>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'next: for &i in members {
        for class in classes.iter_mut() {
            let rep = class[0];
            match find_isomorphism(&graphs[rep], &graphs[i], opts) {
                Ok(Some(_)) => {
                    class.push(i);
                    continue 'next;
                }
                Ok(None) => {}
                Err(Error::Timeout { budget, .. }) => {
                    return Err(Error::Timeout {
                        budget,
                        pair: Some((rep, i)),
                    })
                }
                Err(e) => return Err(e),
            }
        }
        classes.push(vec![i]);
    }
    Ok(classes)
}

/// Share of graphs whose class is a singleton.
pub fn unique_fraction(idx: &IsoClassIndex, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    idx.unique_graphs().len() as f64 / n as f64
}
