//! 1-WL color refinement.
//!
//! A node's color at iteration `k + 1` is the interned id of the pair
//! (its color at `k`, sorted multiset of its neighbors' colors at `k`).
//! Interning is exact: [`ColorTable`] hands out dense ids in first-seen
//! order and never maps two distinct keys to the same id. One table is
//! shared across a whole dataset, which is what makes histograms of
//! different graphs directly comparable.
//!
//! Dataset-wide refinement runs in two phases per iteration: structural keys
//! are computed for every graph in parallel, then interned sequentially in
//! dataset order. Ids are therefore identical from run to run regardless of
//! thread scheduling.

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeLabel};

pub type ColorId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Seed {
    Uniform,
    Label(NodeLabel),
}

/// Dataset-global color interner.
#[derive(Debug, Default, Clone)]
pub struct ColorTable {
    seeds: FxHashMap<Seed, ColorId>,
    // key layout: [parent color, sorted neighbor colors...]
    refined: FxHashMap<Box<[ColorId]>, ColorId>,
    next_id: ColorId,
}

impl ColorTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of ids handed out so far.
    pub fn len(&self) -> usize {
        self.next_id as usize
    }

    pub fn is_empty(&self) -> bool {
        self.next_id == 0
    }

    fn fresh(&mut self) -> ColorId {
        let id = self.next_id;
        self.next_id = self
            .next_id
            .checked_add(1)
            .expect("color id space exhausted");
        id
    }

    fn seed(&mut self, seed: Seed) -> ColorId {
        if let Some(&id) = self.seeds.get(&seed) {
            return id;
        }
        let id = self.fresh();
        self.seeds.insert(seed, id);
        id
    }

    pub fn uniform_color(&mut self) -> ColorId {
        self.seed(Seed::Uniform)
    }

    pub fn label_color(&mut self, label: NodeLabel) -> ColorId {
        self.seed(Seed::Label(label))
    }

    /// Interns `key = [parent, sorted neighbor colors...]`.
    pub fn intern(&mut self, key: &[ColorId]) -> ColorId {
        debug_assert!(!key.is_empty());
        debug_assert!(key[1..].windows(2).all(|w| w[0] <= w[1]));
        if let Some(&id) = self.refined.get(key) {
            return id;
        }
        let id = self.fresh();
        self.refined.insert(key.into(), id);
        id
    }

    fn intern_keys(&mut self, keys: &RefinementKeys) -> Vec<ColorId> {
        (0..keys.len()).map(|v| self.intern(keys.key(v))).collect()
    }
}

/// Node colors at one iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub iteration: usize,
    pub colors: Vec<ColorId>,
}

impl Coloring {
    /// Number of color classes.
    pub fn class_count(&self) -> usize {
        let mut seen = self.colors.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn histogram(&self) -> WlSignature {
        WlSignature::from_colors(self.iteration, &self.colors)
    }

    /// Canonical form of the induced node partition: for every node, the
    /// index of the first node sharing its color.
    pub fn partition(&self) -> Vec<usize> {
        let mut first: FxHashMap<ColorId, usize> = FxHashMap::default();
        self.colors
            .iter()
            .enumerate()
            .map(|(v, &c)| *first.entry(c).or_insert(v))
            .collect()
    }
}

/// Sparse color histogram of one graph at one iteration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WlSignature {
    pub iteration: usize,
    /// `(color, count)` pairs sorted by color; counts are positive.
    pub histogram: Vec<(ColorId, u32)>,
}

impl WlSignature {
    pub fn from_colors(iteration: usize, colors: &[ColorId]) -> Self {
        let mut sorted = colors.to_vec();
        sorted.sort_unstable();
        let mut histogram: Vec<(ColorId, u32)> = Vec::new();
        for c in sorted {
            match histogram.last_mut() {
                Some((last, count)) if *last == c => *count += 1,
                _ => histogram.push((c, 1)),
            }
        }
        WlSignature {
            iteration,
            histogram,
        }
    }

    pub fn node_count(&self) -> usize {
        self.histogram.iter().map(|&(_, n)| n as usize).sum()
    }

    pub fn max_color(&self) -> Option<ColorId> {
        self.histogram.last().map(|&(c, _)| c)
    }

    /// Dense vector with entry `j` = number of nodes of color `j`.
    pub fn to_vector(&self, dim: usize) -> Result<Vec<u32>> {
        if let Some(max_color) = self.max_color() {
            if max_color as usize >= dim {
                return Err(Error::DimensionTooSmall { dim, max_color });
            }
        }
        let mut out = vec![0; dim];
        for &(c, n) in &self.histogram {
            out[c as usize] = n;
        }
        Ok(out)
    }
}

/// `color:count` pairs separated by single spaces.
impl fmt::Display for WlSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, n)) in self.histogram.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}:{n}")?;
        }
        Ok(())
    }
}

/// Histogram over all iterations `0..=k` merged into one multiset.
///
/// Ids from different iterations never collide in a shared table, so the
/// merge is lossless. Two graphs agree on this form exactly when they agree
/// on the last per-iteration histogram.
pub fn concatenated(signatures: &[WlSignature]) -> Vec<(ColorId, u32)> {
    let mut all: Vec<(ColorId, u32)> = signatures
        .iter()
        .flat_map(|s| s.histogram.iter().copied())
        .collect();
    all.sort_unstable();
    all
}

pub fn initial_coloring(g: &Graph, use_labels: bool, table: &mut ColorTable) -> Result<Coloring> {
    let colors = if use_labels {
        let labels = g
            .node_labels()
            .ok_or_else(|| Error::MissingLabels(g.graph_id().to_string()))?;
        labels.iter().map(|&l| table.label_color(l)).collect()
    } else {
        let c = table.uniform_color();
        vec![c; g.node_count()]
    };
    Ok(Coloring {
        iteration: 0,
        colors,
    })
}

/// Flat per-node refinement keys, computed without touching the table.
struct RefinementKeys {
    data: Vec<ColorId>,
    offsets: Vec<usize>,
}

impl RefinementKeys {
    fn compute(g: &Graph, colors: &[ColorId]) -> Self {
        let n = g.node_count();
        let mut data = Vec::with_capacity(n + 2 * g.edge_count());
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            data.push(colors[v]);
            let start = data.len();
            data.extend(g.neighbors(v).iter().map(|&u| colors[u as usize]));
            data[start..].sort_unstable();
            offsets.push(data.len());
        }
        RefinementKeys { data, offsets }
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    fn key(&self, v: usize) -> &[ColorId] {
        &self.data[self.offsets[v]..self.offsets[v + 1]]
    }
}

pub fn refine_step(g: &Graph, coloring: &Coloring, table: &mut ColorTable) -> Coloring {
    assert_eq!(coloring.colors.len(), g.node_count());
    let keys = RefinementKeys::compute(g, &coloring.colors);
    Coloring {
        iteration: coloring.iteration + 1,
        colors: table.intern_keys(&keys),
    }
}

/// All colorings for iterations `0..=k`.
pub fn colorings(
    g: &Graph,
    k: usize,
    use_labels: bool,
    table: &mut ColorTable,
) -> Result<Vec<Coloring>> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(initial_coloring(g, use_labels, table)?);
    for _ in 0..k {
        let next = refine_step(g, out.last().unwrap(), table);
        out.push(next);
    }
    Ok(out)
}

/// Histograms for iterations `0..=k`. Always runs exactly `k` steps.
pub fn signature(
    g: &Graph,
    k: usize,
    use_labels: bool,
    table: &mut ColorTable,
) -> Result<Vec<WlSignature>> {
    Ok(colorings(g, k, use_labels, table)?
        .iter()
        .map(Coloring::histogram)
        .collect())
}

/// Smallest `k <= max_k` whose partition equals the partition at `k + 1`,
/// or `max_k` when none does.
pub fn stable_iteration(g: &Graph, use_labels: bool, table: &mut ColorTable, max_k: usize) -> Result<usize> {
    let mut current = initial_coloring(g, use_labels, table)?;
    let mut classes = current.class_count();
    for k in 0..max_k {
        let next = refine_step(g, &current, table);
        let next_classes = next.class_count();
        // refinement only splits classes, so equal counts mean equal partitions
        if next_classes == classes {
            return Ok(k);
        }
        current = next;
        classes = next_classes;
    }
    Ok(max_k)
}

/// Per-iteration signatures for a whole dataset, indexed `[k][graph]`.
pub fn dataset_signatures(
    graphs: &[Graph],
    k: usize,
    use_labels: bool,
    table: &mut ColorTable,
) -> Result<Vec<Vec<WlSignature>>> {
    let mut colorings = graphs
        .iter()
        .map(|g| initial_coloring(g, use_labels, table))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(k + 1);
    out.push(colorings.par_iter().map(Coloring::histogram).collect());
    for _ in 0..k {
        let keys: Vec<RefinementKeys> = graphs
            .par_iter()
            .zip(colorings.par_iter())
            .map(|(g, c)| RefinementKeys::compute(g, &c.colors))
            .collect();
        colorings = keys
            .iter()
            .zip(&colorings)
            .map(|(keys, prev)| Coloring {
                iteration: prev.iteration + 1,
                colors: table.intern_keys(keys),
            })
            .collect();
        out.push(colorings.par_iter().map(Coloring::histogram).collect());
    }
    Ok(out)
}

/// Refines every graph until its own partition stops changing and returns
/// `(stable iteration, histogram at that iteration)` per graph.
///
/// Isomorphic graphs always receive equal results, so the pair is a sound
/// bucketing key for exact isomorphism checks.
pub fn stable_signatures(
    graphs: &[Graph],
    use_labels: bool,
    table: &mut ColorTable,
) -> Result<Vec<(usize, WlSignature)>> {
    let mut colorings = graphs
        .iter()
        .map(|g| initial_coloring(g, use_labels, table))
        .collect::<Result<Vec<_>>>()?;
    let mut classes: Vec<usize> = colorings.par_iter().map(Coloring::class_count).collect();
    let mut done: Vec<Option<usize>> = vec![None; graphs.len()];
    loop {
        let active: Vec<usize> = (0..graphs.len()).filter(|&i| done[i].is_none()).collect();
        if active.is_empty() {
            break;
        }
        let keys: Vec<RefinementKeys> = active
            .par_iter()
            .map(|&i| RefinementKeys::compute(&graphs[i], &colorings[i].colors))
            .collect();
        for (&i, keys) in active.iter().zip(&keys) {
            let next = Coloring {
                iteration: colorings[i].iteration + 1,
                colors: table.intern_keys(keys),
            };
            let next_classes = next.class_count();
            if next_classes == classes[i] {
                done[i] = Some(colorings[i].iteration);
            } else {
                colorings[i] = next;
                classes[i] = next_classes;
            }
        }
    }
    Ok(colorings
        .iter()
        .zip(done)
        .map(|(c, stable)| (stable.unwrap(), c.histogram()))
        .collect())
}
