use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("label error: {0}")]
    Label(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("unknown label {0}")]
    UnknownLabel(usize),

    #[error("edge {0} is a leaf edge and cannot be contracted")]
    LeafEdge(usize),

    #[error("edge {0} does not exist")]
    NoSuchEdge(usize),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("split {0} is not a member of the canonical split order")]
    Domain(String),

    #[error("label counts differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("trees are over different label sets: n={0} vs n={1}")]
    LabelSetMismatch(usize, usize),

    #[error("incompatible splits {0} and {1}")]
    IncompatibleSplits(String, String),

    #[error("invalid split vector: {0}")]
    InvalidVector(String),

    #[error("cluster {0} is not a clade of the tree")]
    UnknownCluster(String),

    #[error("class assignment is not monotone in depth: {0}")]
    NonMonotoneClasses(String),

    #[error("tree has zero total edge length")]
    ZeroLengthTree,

    #[error("incompatibility graph has an empty side")]
    EmptySide,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate vertex cover: split {0} is compatible with the whole opposite block")]
    DegenerateCover(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("iteration cap exceeded: {0}")]
    IterationCap(String),

    #[error("shared split {0} is missing from one of the trees")]
    NotShared(String),
}

pub type Result<T> = std::result::Result<T, Error>;
