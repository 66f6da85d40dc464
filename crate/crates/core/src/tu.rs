//! Reader for the TU graph-collection flat-file layout.
//!
//! A dataset `DS` lives in one directory:
//!
//! * `DS_A.txt`: one `row, col` pair per line, 1-based global node ids.
//!   Undirected edges usually appear in both directions.
//! * `DS_graph_indicator.txt`: line `i` holds the 1-based graph id of node `i`.
//! * `DS_graph_labels.txt`: line `j` holds the class label of graph `j`.
//! * `DS_node_labels.txt` (optional): line `i` holds the label of node `i`.
//!
//! Attribute and edge-label files are ignored.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeLabel};

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub graphs: Vec<Graph>,
    /// Dense class ids in `0..num_classes`, one per graph.
    pub class_labels: Vec<u32>,
    pub has_node_labels: bool,
    pub num_classes: usize,
    pub meta: DatasetMeta,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    /// Original class label for every dense class id.
    pub class_values: Vec<i64>,
    /// Distinct node-label values across the dataset (0 when unlabeled).
    pub node_label_values: usize,
    /// Self-loop rows dropped while reading the edge file.
    pub dropped_self_loops: usize,
}

impl Dataset {
    /// Builds a dataset from already-constructed graphs and raw class labels.
    pub fn from_graphs(name: impl Into<String>, graphs: Vec<Graph>, raw_labels: &[i64]) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if graphs.len() != raw_labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} graphs but {} class labels",
                graphs.len(),
                raw_labels.len()
            )));
        }
        let (class_labels, class_values) = remap_classes(raw_labels);
        let has_node_labels = graphs.iter().all(Graph::has_labels);
        let node_label_values = graphs
            .iter()
            .filter_map(Graph::node_labels)
            .flatten()
            .collect::<BTreeSet<_>>()
            .len();
        let graphs = graphs
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.with_id(i))
            .collect();
        Ok(Dataset {
            name: name.into(),
            graphs,
            class_labels,
            has_node_labels,
            num_classes: class_values.len(),
            meta: DatasetMeta {
                class_values,
                node_label_values,
                dropped_self_loops: 0,
            },
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

fn remap_classes(raw: &[i64]) -> (Vec<u32>, Vec<i64>) {
    let values: Vec<i64> = raw.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let dense = raw
        .iter()
        .map(|v| values.binary_search(v).unwrap() as u32)
        .collect();
    (dense, values)
}

struct Lines {
    path: PathBuf,
    text: String,
}

impl Lines {
    fn read(dir: &Path, name: &str, suffix: &str, required: bool) -> Result<Option<Self>> {
        let path = dir.join(format!("{name}_{suffix}.txt"));
        if !path.is_file() {
            return if required {
                Err(Error::MissingFile(path))
            } else {
                Ok(None)
            };
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Some(Lines { path, text }))
    }

    /// Non-blank lines with 1-based line numbers.
    fn iter(&self) -> impl Iterator<Item = (usize, &str)> {
        self.text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
    }

    fn malformed(&self, line: usize, reason: impl Into<String>) -> Error {
        Error::MalformedLine {
            file: self.path.clone(),
            line,
            reason: reason.into(),
        }
    }

    fn integers<T: std::str::FromStr>(&self) -> Result<Vec<T>> {
        self.iter()
            .map(|(no, l)| {
                // a few releases carry extra comma-separated columns; the first one is the value
                let field = l.split(',').next().unwrap().trim();
                field
                    .parse()
                    .map_err(|_| self.malformed(no, format!("expected an integer, got {l:?}")))
            })
            .collect()
    }
}

/// Reads dataset `name` from `dir`.
pub fn parse_tu_dataset(dir: &Path, name: &str) -> Result<Dataset> {
    let edges_file = Lines::read(dir, name, "A", true)?.unwrap();
    let indicator_file = Lines::read(dir, name, "graph_indicator", true)?.unwrap();
    let graph_labels_file = Lines::read(dir, name, "graph_labels", true)?.unwrap();
    let node_labels_file = Lines::read(dir, name, "node_labels", false)?;

    let raw_classes: Vec<i64> = graph_labels_file.integers()?;
    if raw_classes.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let graph_count = raw_classes.len();

    // graph of every global node, and its local index inside that graph
    let mut graph_of: Vec<usize> = Vec::new();
    let mut local: Vec<usize> = Vec::new();
    let mut sizes = vec![0usize; graph_count];
    for (no, l) in indicator_file.iter() {
        let id: usize = l
            .parse()
            .map_err(|_| indicator_file.malformed(no, format!("expected a graph id, got {l:?}")))?;
        if id == 0 || id > graph_count {
            return Err(indicator_file.malformed(
                no,
                format!("graph id {id} outside 1..={graph_count}"),
            ));
        }
        graph_of.push(id - 1);
        local.push(sizes[id - 1]);
        sizes[id - 1] += 1;
    }
    let node_total = graph_of.len();

    let node_labels: Option<Vec<NodeLabel>> = match &node_labels_file {
        Some(f) => {
            let labels: Vec<NodeLabel> = f.integers()?;
            if labels.len() != node_total {
                return Err(Error::LabelLengthMismatch {
                    expected: node_total,
                    actual: labels.len(),
                });
            }
            Some(labels)
        }
        None => None,
    };

    let mut edge_lists: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph_count];
    let mut dropped_self_loops = 0;
    for (no, l) in edges_file.iter() {
        let mut parts = l.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(edges_file.malformed(no, "expected `row, col`"));
        };
        let parse = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| edges_file.malformed(no, format!("expected a node id, got {s:?}")))?;
            if v == 0 || v > node_total {
                return Err(edges_file.malformed(no, format!("node id {v} outside 1..={node_total}")));
            }
            Ok(v - 1)
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if graph_of[u] != graph_of[v] {
            return Err(Error::DanglingEdge {
                u: u + 1,
                v: v + 1,
                graph_u: graph_of[u] + 1,
                graph_v: graph_of[v] + 1,
            });
        }
        if u == v {
            dropped_self_loops += 1;
            continue;
        }
        edge_lists[graph_of[u]].push((local[u], local[v]));
    }

    let mut per_graph_labels: Option<Vec<Vec<NodeLabel>>> = node_labels.map(|labels| {
        let mut out: Vec<Vec<NodeLabel>> = sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (node, l) in labels.into_iter().enumerate() {
            out[graph_of[node]].push(l);
        }
        out
    });

    let graphs = edge_lists
        .into_iter()
        .enumerate()
        .map(|(gi, edges)| {
            let labels = per_graph_labels
                .as_mut()
                .map(|all| std::mem::take(&mut all[gi]));
            Graph::build(sizes[gi], edges, labels)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut d = Dataset::from_graphs(name, graphs, &raw_classes)?;
    d.meta.dropped_self_loops = dropped_self_loops;
    Ok(d)
}

/// Replaces every node label with `0`. Unlabeled graphs are left unlabeled.
pub fn strip_node_labels(d: &Dataset) -> Dataset {
    let graphs = d
        .graphs
        .iter()
        .map(|g| if g.has_labels() { g.with_constant_labels() } else { g.clone() })
        .collect();
    Dataset {
        graphs,
        meta: DatasetMeta {
            node_label_values: usize::from(d.has_node_labels),
            ..d.meta.clone()
        },
        ..d.clone()
    }
}
