use thiserror::Error;

use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("code set is empty")]
    EmptyCodeSet,
    #[error("duplicate code word {0}")]
    DuplicateWord(Word),
    #[error("symbol at position {position} is not in the alphabet")]
    BadSymbol { position: usize },
    #[error("empty word")]
    EmptyWord,
    #[error("invalid alphabet: {0}")]
    BadAlphabet(String),
    #[error("family has no word enumerator")]
    EnumeratorUnavailable,
    #[error("growth certificate violated at length {length}")]
    CertificateViolated { length: usize },
    #[error("no bracket for f(x) = 1: f never exceeds 1 where it converges")]
    NoBracket,
    #[error("cannot certify an upper bound for the series tail")]
    TailUnbounded,
    #[error("oracle state budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("truncated sum eta = {0} is not above 1")]
    EtaNotAboveOne(f64),
    #[error("unique decomposition of the code is not established")]
    UniqueDecompositionUnknown,
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("adjacency is not irreducible")]
    NotIrreducible,
    #[error("bad builtin parameters: {0}")]
    BadParams(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
