//! Induced connected graphlet counts up to four nodes.
//!
//! Connected vertex sets are enumerated with ESU, so each set is visited
//! exactly once. Three-node sets are classified by edge count; four-node sets
//! by a 64-entry table over the 6-bit mask of induced edges.

use serde::{Deserialize, Serialize};

use crate::audit::{self, Identifiability, Ratio};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::iso::{self, IsoOptions, DEFAULT_ISO_BUDGET};
use crate::tu::Dataset;

/// Default cap on enumerated connected subgraphs per graph.
pub const DEFAULT_MOTIF_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Size3Counts {
    pub p3: u64,
    pub triangle: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Size4Counts {
    pub p4: u64,
    pub claw: u64,
    pub c4: u64,
    pub paw: u64,
    pub diamond: u64,
    pub k4: u64,
}

impl Size4Counts {
    fn bump(&mut self, kind: Graphlet4) {
        match kind {
            Graphlet4::P4 => self.p4 += 1,
            Graphlet4::Claw => self.claw += 1,
            Graphlet4::C4 => self.c4 += 1,
            Graphlet4::Paw => self.paw += 1,
            Graphlet4::Diamond => self.diamond += 1,
            Graphlet4::K4 => self.k4 += 1,
        }
    }
}

/// Induced connected graphlet counts of one graph. Size classes above the
/// requested maximum are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MotifVector {
    pub node_count: u64,
    pub edge_count: u64,
    pub size3: Option<Size3Counts>,
    pub size4: Option<Size4Counts>,
}

/// Column order of [`MotifVector::columns`].
pub const MOTIF_COLUMNS: [&str; 10] = [
    "node_count",
    "edge_count",
    "p3",
    "triangle",
    "p4",
    "claw",
    "c4",
    "paw",
    "diamond",
    "k4",
];

impl MotifVector {
    /// Values in [`MOTIF_COLUMNS`] order; absent size classes are `None`.
    pub fn columns(&self) -> [Option<u64>; 10] {
        let s3 = self.size3;
        let s4 = self.size4;
        [
            Some(self.node_count),
            Some(self.edge_count),
            s3.map(|s| s.p3),
            s3.map(|s| s.triangle),
            s4.map(|s| s.p4),
            s4.map(|s| s.claw),
            s4.map(|s| s.c4),
            s4.map(|s| s.paw),
            s4.map(|s| s.diamond),
            s4.map(|s| s.k4),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Graphlet4 {
    P4,
    Claw,
    C4,
    Paw,
    Diamond,
    K4,
}

// bit i of the mask is the pair PAIRS[i]
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

const fn classify_mask(mask: usize) -> Option<Graphlet4> {
    let mut deg = [0usize; 4];
    let mut edges = 0;
    let mut i = 0;
    while i < 6 {
        if mask & (1 << i) != 0 {
            deg[PAIRS[i].0] += 1;
            deg[PAIRS[i].1] += 1;
            edges += 1;
        }
        i += 1;
    }
    let mut max = 0;
    let mut isolated = false;
    let mut v = 0;
    while v < 4 {
        if deg[v] > max {
            max = deg[v];
        }
        if deg[v] == 0 {
            isolated = true;
        }
        v += 1;
    }
    // On four nodes with no isolated vertex, 3 edges are disconnected only as
    // triangle + isolated vertex, and fewer than 3 edges never connect.
    match edges {
        0..=2 => None,
        3 if isolated => None,
        3 if max == 3 => Some(Graphlet4::Claw),
        3 => Some(Graphlet4::P4),
        4 if max == 3 => Some(Graphlet4::Paw),
        4 => Some(Graphlet4::C4),
        5 => Some(Graphlet4::Diamond),
        _ => Some(Graphlet4::K4),
    }
}

const GRAPHLET4_TABLE: [Option<Graphlet4>; 64] = {
    let mut table = [None; 64];
    let mut mask = 0;
    while mask < 64 {
        table[mask] = classify_mask(mask);
        mask += 1;
    }
    table
};

struct Census<'a> {
    g: &'a Graph,
    max_size: usize,
    budget: u64,
    visited: u64,
    size3: Size3Counts,
    size4: Size4Counts,
    sub: Vec<usize>,
}

impl Census<'_> {
    fn record(&mut self) -> bool {
        self.visited += 1;
        if self.visited > self.budget {
            return false;
        }
        match self.sub.len() {
            3 => {
                let (a, b, c) = (self.sub[0], self.sub[1], self.sub[2]);
                let e = [(a, b), (a, c), (b, c)]
                    .iter()
                    .filter(|&&(x, y)| self.g.has_edge(x, y))
                    .count();
                if e == 3 {
                    self.size3.triangle += 1;
                } else {
                    self.size3.p3 += 1;
                }
            }
            4 => {
                let mut mask = 0;
                for (bit, &(i, j)) in PAIRS.iter().enumerate() {
                    if self.g.has_edge(self.sub[i], self.sub[j]) {
                        mask |= 1 << bit;
                    }
                }
                let kind = GRAPHLET4_TABLE[mask].expect("ESU only yields connected sets");
                self.size4.bump(kind);
            }
            _ => {}
        }
        true
    }

    /// ESU extension step; `root` is the smallest vertex of the set.
    fn extend(&mut self, extension: Vec<usize>, root: usize) -> bool {
        // singletons are not graphlets
        if self.sub.len() > 1 && !self.record() {
            return false;
        }
        if self.sub.len() == self.max_size {
            return true;
        }
        let mut ext = extension;
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in self.g.neighbors(w) {
                let u = u as usize;
                if u > root && !self.sub.contains(&u) && !next.contains(&u) && !self.touches_sub(u) {
                    next.push(u);
                }
            }
            self.sub.push(w);
            let ok = self.extend(next, root);
            self.sub.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    fn touches_sub(&self, u: usize) -> bool {
        self.sub.iter().any(|&s| self.g.has_edge(s, u))
    }
}

/// Counts induced connected graphlets with at most `max_size` nodes.
///
/// Fails with [`Error::CountingInfeasible`] once more than `budget`
/// connected subgraphs of size 2..=`max_size` have been visited.
pub fn motif_vector(g: &Graph, max_size: usize, budget: u64) -> Result<MotifVector> {
    if !(2..=4).contains(&max_size) {
        return Err(Error::InvalidArgument(format!(
            "motif size {max_size} outside 2..=4"
        )));
    }
    let mut census = Census {
        g,
        max_size,
        budget,
        visited: 0,
        size3: Size3Counts::default(),
        size4: Size4Counts::default(),
        sub: Vec::with_capacity(4),
    };
    for v in 0..g.node_count() {
        census.sub.push(v);
        let ext: Vec<usize> = g
            .neighbors(v)
            .iter()
            .map(|&u| u as usize)
            .filter(|&u| u > v)
            .collect();
        let ok = census.extend(ext, v);
        census.sub.pop();
        if !ok {
            return Err(Error::CountingInfeasible {
                graph: g.graph_id(),
                budget,
            });
        }
    }
    Ok(MotifVector {
        node_count: g.node_count() as u64,
        edge_count: g.edge_count() as u64,
        size3: (max_size >= 3).then_some(census.size3),
        size4: (max_size >= 4).then_some(census.size4),
    })
}

/// Which part of the motif vector identifies a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotifKey {
    /// The six connected four-node graphlet counts.
    #[default]
    Size4,
    /// Every column, node and edge counts included.
    Full,
}

#[derive(Debug, Clone)]
pub struct MotifOptions {
    pub max_size: usize,
    pub budget: u64,
    pub key: MotifKey,
    pub identifiability: Identifiability,
    pub iso_budget: u64,
}

impl Default for MotifOptions {
    fn default() -> Self {
        MotifOptions {
            max_size: 4,
            budget: DEFAULT_MOTIF_BUDGET,
            key: MotifKey::Size4,
            identifiability: Identifiability::UniqueGraphs,
            iso_budget: DEFAULT_ISO_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotifSummary {
    pub dataset: String,
    pub key: MotifKey,
    pub identifiable: Ratio,
    pub identifiable_pct: String,
    pub upper_bound: Ratio,
    pub upper_bound_pct: String,
}

pub fn motif_vectors(d: &Dataset, max_size: usize, budget: u64) -> Result<Vec<MotifVector>> {
    use rayon::prelude::*;
    d.graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            motif_vector(g, max_size, budget).map_err(|e| match e {
                Error::CountingInfeasible { budget, .. } => Error::CountingInfeasible { graph: i, budget },
                other => other,
            })
        })
        .collect()
}

/// Identifiable fraction and majority-vote bound on motif vectors.
///
/// Uniqueness is decided with node labels whenever the dataset has them;
/// the motif vectors themselves ignore labels.
pub fn motif_identifiability(d: &Dataset, opts: &MotifOptions) -> Result<MotifSummary> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let vectors = motif_vectors(d, opts.max_size, opts.budget)?;
    let keys: Vec<Vec<Option<u64>>> = vectors
        .iter()
        .map(|v| match opts.key {
            MotifKey::Size4 => v.columns()[4..].to_vec(),
            MotifKey::Full => v.columns().to_vec(),
        })
        .collect();
    let idx = iso::isomorphism_classes(
        d,
        IsoOptions {
            use_labels: d.has_node_labels,
            budget: opts.iso_budget,
        },
    )?;
    let identifiable = audit::identifiable(&keys, &idx, opts.identifiability);
    let upper_bound = audit::majority_vote(&keys, &d.class_labels);
    Ok(MotifSummary {
        dataset: d.name.clone(),
        key: opts.key,
        identifiable_pct: identifiable.pct_string(),
        identifiable,
        upper_bound_pct: upper_bound.pct_string(),
        upper_bound,
    })
}
