use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{}", fmt_parse(.line, .column, .message))]
    Parse {
        line: Option<usize>,
        column: usize,
        message: String,
    },

    #[error("duplicate taxon label `{0}`")]
    DuplicateTaxon(String),

    #[error("invalid taxon label `{0}`")]
    InvalidTaxon(String),

    #[error("unknown taxon `{0}`")]
    UnknownTaxon(String),

    #[error("empty taxon set")]
    EmptyTaxa,

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("tree {index} is not binary")]
    NotBinary { index: usize },

    #[error("empty tree list")]
    EmptyInput,

    #[error("{what} ceiling exceeded: {actual} > {limit}")]
    Ceiling {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("graph is reducible to the empty graph (treewidth <= 2); no K4 minor exists")]
    Reducible,

    #[error("reduction trace does not match the graph: {0}")]
    TraceMismatch(String),

    #[error("no minimally adjacent pair of bounded faces: {0}")]
    NoFacePair(String),

    #[error("operation not valid for this input: {0}")]
    Contract(String),

    /// A verification gate failed. This is a bug, never an input problem.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

fn fmt_parse(line: &Option<usize>, column: &usize, message: &str) -> String {
    match line {
        Some(line) => format!("parse error at line {line}, column {column}: {message}"),
        None => format!("parse error at column {column}: {message}"),
    }
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}
