use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node index {index} out of range for a graph with {node_count} nodes")]
    IndexOutOfRange { index: usize, node_count: usize },
    #[error("expected {expected} node labels, got {actual}")]
    LabelLengthMismatch { expected: usize, actual: usize },

    #[error("missing dataset file {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: malformed line: {reason}")]
    MalformedLine {
        file: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("edge ({u}, {v}) joins nodes of graphs {graph_u} and {graph_v}")]
    DanglingEdge {
        u: usize,
        v: usize,
        graph_u: usize,
        graph_v: usize,
    },
    #[error("dataset contains no graphs")]
    EmptyDataset,

    #[error("fetching {url} failed: {reason}")]
    FetchFailed { url: String, reason: String },
    #[error("checksum mismatch for {name}: expected {expected}, got {actual}")]
    ChecksumMismatch {
        name: String,
        expected: String,
        actual: String,
    },
    #[error("extracting {archive}: {reason}")]
    ExtractError { archive: PathBuf, reason: String },

    #[error("graph {0} has no node labels")]
    MissingLabels(String),
    #[error("dimension {dim} too small for color id {max_color}")]
    DimensionTooSmall { dim: usize, max_color: u32 },
    #[error("isomorphism search exceeded budget of {budget} search nodes{}", pair_suffix(.pair))]
    Timeout {
        budget: u64,
        pair: Option<(usize, usize)>,
    },
    #[error("motif counting for graph {graph} exceeded budget of {budget} subgraphs")]
    CountingInfeasible { graph: usize, budget: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn pair_suffix(pair: &Option<(usize, usize)>) -> String {
    match pair {
        Some((a, b)) => format!(" (graphs {a} and {b})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
