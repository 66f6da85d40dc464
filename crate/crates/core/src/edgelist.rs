//! Plain edge-list files for single graphs.
//!
//! ```text
//! # comment
//! 0 1
//! 1 2
//! label 0 5
//! ```
//!
//! One `u v` edge per line, 0-based. `label u l` assigns node label `l`; once
//! any label line appears, unlabeled nodes get label `0`. The node count is
//! one more than the largest index mentioned. Blank lines and `#` comments
//! are skipped.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeLabel};

pub fn parse_edge_list(text: &str, source: &Path) -> Result<Graph> {
    let malformed = |line: usize, reason: String| Error::MalformedLine {
        file: source.to_path_buf(),
        line,
        reason,
    };
    let mut edges = Vec::new();
    let mut labels: Vec<(usize, NodeLabel)> = Vec::new();
    let mut node_count = 0;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| malformed(no, format!("expected a non-negative integer, got {s:?}")))
        };
        match fields.as_slice() {
            ["label", u, l] => {
                let u = int(u)?;
                let l = int(l)?;
                let l = NodeLabel::try_from(l).map_err(|_| malformed(no, format!("label {l} too large")))?;
                node_count = node_count.max(u + 1);
                labels.push((u, l));
            }
            [u, v] => {
                let (u, v) = (int(u)?, int(v)?);
                if u == v {
                    return Err(malformed(no, format!("self-loop on node {u}")));
                }
                node_count = node_count.max(u.max(v) + 1);
                edges.push((u, v));
            }
            _ => return Err(malformed(no, "expected `u v` or `label u l`".into())),
        }
    }
    let node_labels = (!labels.is_empty()).then(|| {
        let mut out = vec![0; node_count];
        for (u, l) in labels {
            out[u] = l;
        }
        out
    });
    Graph::build(node_count, edges, node_labels)
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}
