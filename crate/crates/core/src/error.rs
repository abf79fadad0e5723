use std::fmt;

use thiserror::Error;

use crate::order::OrderDecision;

/// Source position (1-based) of a token or AST node.
///
/// Positions are diagnostic metadata only: two spans always compare equal so
/// that ASTs parsed from differently formatted sources can be compared
/// structurally.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable tuples overlap on `{0}`")]
    Disjointness(String),

    #[error("cannot extend operator on [{from}] to register [{to}]")]
    Extension { from: String, to: String },

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    Hermiticity(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid variable tuple: {0}")]
    InvalidVars(String),

    #[error("syntax error at {span}: expected {expected}, found {found}")]
    Syntax {
        span: Span,
        expected: String,
        found: String,
    },

    #[error("{span}: unknown name `{name}`")]
    UnknownName { name: String, span: Span },

    #[error("{span}: `{name}` is defined more than once")]
    DuplicateName { name: String, span: Span },

    #[error("{span}: `{name}` acts on {expected} qubit(s) but is applied to [{vars}]")]
    ArityMismatch {
        name: String,
        expected: usize,
        vars: String,
        span: Span,
    },

    #[error("{span}: `{name}` is not unitary")]
    NotUnitary { name: String, span: Span },

    #[error("{span}: `{name}` is not a quantum predicate (0 <= M <= I violated)")]
    NotPredicate { name: String, span: Span },

    #[error("{span}: `{name}` is not a two-outcome projective measurement")]
    NotMeasurement { name: String, span: Span },

    #[error("{span}: variable `{var}` is not declared in the proof register")]
    UndeclaredVariable { var: String, span: Span },

    #[error("program contains a while loop; only loop-free programs are supported here")]
    LoopPresent,

    #[error("set of {count} elements exceeds the cap of {cap} at {node}")]
    SetExplosion {
        node: String,
        count: usize,
        cap: usize,
    },

    #[error("{span}: while loop has no invariant annotation")]
    MissingInvariant { span: Span },

    #[error("{span}: The predicate '{invariant}' is not a valid loop invariant.")]
    InvalidInvariant {
        invariant: String,
        span: Span,
        decision: Box<OrderDecision>,
    },

    #[error("{span}: could not decide whether '{invariant}' is a loop invariant")]
    InvariantUndecided {
        invariant: String,
        span: Span,
        decision: Box<OrderDecision>,
    },

    #[error("certificate failed re-verification: {0}")]
    InternalCertificate(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
