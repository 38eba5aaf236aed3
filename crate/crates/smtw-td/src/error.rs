use thiserror::Error;

/// Failures of decomposition validation, conversion and parsing.
///
/// Vertex and bag numbers in messages are 1-based, as in the `.td` format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TdError {
    #[error("decomposition has no bags")]
    Empty,
    #[error("bag graph is not a tree: {0}")]
    NotATree(String),
    #[error("root {0} is not a bag")]
    BadRoot(usize),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("edge {{{0},{1}}} uncovered")]
    UncoveredEdge(usize, usize),
    #[error("vertex {0} appears in no bag")]
    MissingVertex(usize),
    #[error("bags containing vertex {0} are not connected")]
    DisconnectedVertex(usize),
    #[error("node {node} is not a valid {kind} node")]
    NotNice { node: usize, kind: &'static str },
    #[error("{msg} at line {line}")]
    Parse { line: usize, msg: String },
}
