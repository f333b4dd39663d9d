use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("arity mismatch for {symbol}: expected {expected}, found {found}")]
    Arity { symbol: String, expected: usize, found: usize },
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("duplicate symbol {0}")]
    DuplicateSymbol(String),
    #[error("unknown theory {0}")]
    UnknownTheory(String),
    #[error("unknown name {0}")]
    UnknownName(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("language mismatch: {0}")]
    LanguageMismatch(String),
    #[error("vertex {vertex} out of range for structure on {n} vertices")]
    VertexRange { vertex: usize, n: usize },
    #[error("structure too large: {0}")]
    TooLarge(String),
    #[error("resource guard exceeded ({0} nodes); raise THEON_GUARD to continue")]
    Guard(u64),
    #[error("level error: {0}")]
    Level(String),
    #[error("incomplete table: missing class {0}")]
    IncompleteTable(String),
    #[error("interpretation not verified: {0}")]
    Unverified(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
