use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed document: {0}")]
    Document(String),

    #[error("graph has a self-loop on vertex {0:?}")]
    SelfLoop(String),

    #[error("edge {0:?}-{1:?} has non-positive weight {2}")]
    NonPositiveWeight(String, String, f64),

    #[error("duplicate edge {0:?}-{1:?}")]
    DuplicateEdge(String, String),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("no number of retained pairs gives a connected graph")]
    NoConnectedGraph,

    #[error("graph needs at least two vertices and one edge")]
    TooSmall,

    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),

    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),

    #[error("vertex set must be a nonempty proper subset of the vertices")]
    ImproperSubset,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("not a partition of the vertex set: {0}")]
    NotAPartition(String),

    #[error("invalid encoding tree: {0}")]
    InvalidTree(String),

    #[error("nodes are not siblings")]
    NotSiblings,

    #[error("operation would exceed height cap {cap}")]
    HeightCap { cap: usize },

    #[error("{what} limited to n <= {limit}, got n = {n}")]
    SizeGuard { what: &'static str, limit: usize, n: usize },

    #[error("k = {k} exceeds the {available} available positive pairs")]
    TooManyPairs { k: usize, available: usize },

    #[error("invalid similarity matrix: {0}")]
    Similarity(String),

    #[error("module function returned negative value {0}")]
    NegativeModuleValue(f64),

    #[error("feature catalog has no entry for vertex {0:?}")]
    MissingFeatures(String),

    #[error("vertex id {0:?} already present")]
    DuplicateId(String),

    #[error("invalid insertion request: {0}")]
    InvalidPoint(String),

    #[error("empty abstraction set for label {0:?}")]
    EmptyAbstraction(String),

    #[error("{0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure classes, used by the command line for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Invariant,
    Guard,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Document(_) | Error::Similarity(_) | Error::Io(_) => {
                ErrorClass::Parse
            }
            Error::SizeGuard { .. } => ErrorClass::Guard,
            _ => ErrorClass::Invariant,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Document(e.to_string())
    }
}
