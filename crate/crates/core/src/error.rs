use thiserror::Error;

/// Errors produced by the automaton toolbox and the decision procedures built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("kind violation: {0}")]
    KindViolation(String),
    #[error("dangling state name `{0}`")]
    DanglingState(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("missing initial state")]
    MissingInitial,
    #[error("automaton is not polycyclic")]
    NotPolycyclic,
    #[error("alphabets differ: [{left}] vs [{right}]")]
    AlphabetMismatch { left: String, right: String },
    #[error("transition undefined in constraint automaton at state `{state}` on `{symbol}`")]
    UndefinedTransition { state: String, symbol: String },
    #[error("segment {segment} pumps at `{expected}` but the constraint automaton is in `{actual}`")]
    PumpStateMismatch {
        segment: usize,
        expected: String,
        actual: String,
    },
    #[error("malformed certificate: {0}")]
    MalformedCode(String),
    #[error("word must be nonempty")]
    EmptyWord,
    #[error("polynomial-time criterion does not apply to this constraint")]
    PCaseNotApplicable,
    #[error("hardness criterion fails: {0}")]
    CriterionFailed(String),
    #[error("tail language is empty")]
    EmptyU,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
