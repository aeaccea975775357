use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("non-unitary fused gate: diagonal entry has modulus {modulus}")]
    NonUnitaryFused { modulus: f64 },
    #[error("fused gate has {found} diagonal entries, expected {expected}")]
    DiagonalLength { expected: usize, found: usize },
    #[error("diagonal gate is missing its entries")]
    MissingDiagonal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("layout needs {what} (got {detail})")]
    Invalid { what: &'static str, detail: String },
}

impl LayoutError {
    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> LayoutError {
        LayoutError::Invalid { what, detail: detail.into() }
    }
}

/// A malformed line in a raw or optimized circuit file.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unknown gate symbol `{0}`")]
    UnknownGate(String),
    #[error("wrong token count for {kind}: expected {expected}, found {found}")]
    TokenCount { kind: String, expected: String, found: usize },
    #[error("qubit index out of range: {qubit} >= {limit}")]
    QubitOutOfRange { qubit: usize, limit: usize },
    #[error("repeated target qubit {0}")]
    RepeatedTarget(usize),
    #[error("duplicate gate id {0}")]
    DuplicateId(usize),
    #[error("gate id {found} out of sequence, expected {expected}")]
    IdOutOfSequence { expected: usize, found: usize },
    #[error("fused gates are not allowed in a raw circuit")]
    FusedInRaw,
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("expected a record count, found `{0}`")]
    ExpectedCount(String),
    #[error("record announces {expected} lines but only {found} follow")]
    CountMismatch { expected: usize, found: usize },
    #[error("swap record must stand alone (record count {0})")]
    SwapNotAlone(usize),
    #[error("{op} arity mismatch: expected {expected} tokens, found {found}")]
    SwapArity { op: &'static str, expected: usize, found: usize },
    #[error("invalid {op} operands: {reason}")]
    InvalidSwap { op: &'static str, reason: String },
    #[error("gate target {qubit} lies outside the chunk (chunk qubits = {chunk})")]
    OutsideChunk { qubit: usize, chunk: usize },
    #[error("{0}")]
    Gate(GateError),
}

impl ParseError {
    pub(crate) fn new(line: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, kind }
    }
}
