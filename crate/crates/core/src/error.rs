use thiserror::Error;

/// Errors surfaced by every layer of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("invalid expression: {0}")]
    Validity(String),
    #[error("substitution produced an invalid expression")]
    InvalidResult,
    #[error("duplicate equation for `{0}`")]
    DuplicateEquation(String),
    #[error("unbound reference `{0}`")]
    UnboundReference(String),
    #[error("open term: free variable `{0}`")]
    OpenTerm(String),
    #[error("recursion unfolding diverged at `{0}`")]
    UnfoldingDiverged(String),
    #[error("state budget exceeded ({0} states)")]
    StateBudgetExceeded(usize),
    #[error("label universe mismatch: {0}")]
    LabelUniverseMismatch(String),
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("unsupported fragment/relation combination: {0}")]
    FragmentUnsupported(String),
    #[error("malformed aut input at line {line}: {msg}")]
    Aut { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
