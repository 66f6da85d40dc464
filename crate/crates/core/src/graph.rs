//! Immutable undirected simple graphs with optional integer node labels.
//!
//! Edges are stored canonically as `(u, v)` with `u < v`, sorted and
//! deduplicated. Adjacency is materialized once at construction in CSR form
//! (one sorted neighbor slice per node), so a [`Graph`] can be shared freely
//! across threads.

use std::fmt;

use crate::error::{Error, Result};

/// Node-label value as read from a dataset.
pub type NodeLabel = u32;

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    graph_id: usize,
    node_count: usize,
    edges: Vec<(u32, u32)>,
    labels: Option<Vec<NodeLabel>>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    /// Builds a canonical graph from an arbitrary edge list.
    ///
    /// Edges may be given in either direction and may repeat; they collapse
    /// to one undirected edge each.
    pub fn build(
        node_count: usize,
        edge_list: impl IntoIterator<Item = (usize, usize)>,
        node_labels: Option<Vec<NodeLabel>>,
    ) -> Result<Self> {
        if node_count > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!(
                "node count {node_count} exceeds u32 range"
            )));
        }
        let mut edges = Vec::new();
        for (u, v) in edge_list {
            for index in [u, v] {
                if index >= node_count {
                    return Err(Error::IndexOutOfRange { index, node_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            edges.push((a as u32, b as u32));
        }
        edges.sort_unstable();
        edges.dedup();
        if let Some(labels) = &node_labels {
            if labels.len() != node_count {
                return Err(Error::LabelLengthMismatch {
                    expected: node_count,
                    actual: labels.len(),
                });
            }
        }

        let mut degree = vec![0usize; node_count];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        // Lower neighbors first, then higher ones; both passes walk edges in
        // (u, v) order, so every list comes out sorted.
        for &(u, v) in &edges {
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for &(u, v) in &edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }

        Ok(Graph {
            graph_id: 0,
            node_count,
            edges,
            labels: node_labels,
            offsets,
            neighbors,
        })
    }

    pub fn with_id(mut self, graph_id: usize) -> Self {
        self.graph_id = graph_id;
        self
    }

    pub fn graph_id(&self) -> usize {
        self.graph_id
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges, `u < v`, sorted ascending.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn node_labels(&self) -> Option<&[NodeLabel]> {
        self.labels.as_deref()
    }

    pub fn has_labels(&self) -> bool {
        self.labels.is_some()
    }

    pub fn adjacency(&self) -> AdjacencyView<'_> {
        AdjacencyView { graph: self }
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// Node degrees in non-decreasing order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degrees: Vec<usize> = (0..self.node_count).map(|v| self.degree(v)).collect();
        degrees.sort_unstable();
        degrees
    }

    /// Same structure with every node label replaced by `0`.
    pub fn with_constant_labels(&self) -> Graph {
        Graph {
            labels: Some(vec![0; self.node_count]),
            ..self.clone()
        }
    }

    /// Relabels nodes so that old node `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.node_count {
            return Err(Error::InvalidArgument(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.node_count
            )));
        }
        let labels = self.labels.as_ref().map(|labels| {
            let mut out = vec![0; labels.len()];
            for (v, &l) in labels.iter().enumerate() {
                out[perm[v]] = l;
            }
            out
        });
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u as usize], perm[v as usize]));
        Ok(Graph::build(self.node_count, edges, labels)?.with_id(self.graph_id))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("graph_id", &self.graph_id)
            .field("node_count", &self.node_count)
            .field("edges", &self.edges)
            .field("labels", &self.labels)
            .finish()
    }
}

/// Borrowed per-node sorted neighbor lists.
#[derive(Clone, Copy)]
pub struct AdjacencyView<'a> {
    graph: &'a Graph,
}

impl<'a> AdjacencyView<'a> {
    pub fn neighbors(&self, node: usize) -> &'a [u32] {
        self.graph.neighbors(node)
    }

    pub fn degree(&self, node: usize) -> usize {
        self.graph.degree(node)
    }

    pub fn len(&self) -> usize {
        self.graph.node_count
    }

    pub fn is_empty(&self) -> bool {
        self.graph.node_count == 0
    }

    /// Reconstructs the canonical edge set from the neighbor lists.
    pub fn edge_set(&self) -> Vec<(u32, u32)> {
        let mut edges = Vec::new();
        for u in 0..self.len() {
            for &v in self.neighbors(u) {
                if (u as u32) < v {
                    edges.push((u as u32, v));
                }
            }
        }
        edges
    }
}
