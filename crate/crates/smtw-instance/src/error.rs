use thiserror::Error;

/// Structural problems with instances and matchings.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("{0}")]
    Syntax(String),
    #[error("unknown {side} {id} at line {line}")]
    UnknownAgent {
        side: &'static str,
        id: usize,
        line: usize,
    },
    #[error("{side} {id} lists {other} twice")]
    Duplicate {
        side: &'static str,
        id: usize,
        other: usize,
    },
    #[error("{side} {id} has an empty tie group")]
    EmptyGroup { side: &'static str, id: usize },
    #[error("man {man} and woman {woman}: acceptability is not mutual")]
    Asymmetric { man: usize, woman: usize },
    #[error("ranks of {side} {id} are not of the form 1..t")]
    BadRanks { side: &'static str, id: usize },
    #[error("matching does not fit an instance with {men} men and {women} women")]
    MatchingShape { men: usize, women: usize },
    #[error("matching is not injective at man {man} / woman {woman}")]
    NotInjective { man: usize, woman: usize },
    #[error("matched pair (man {man}, woman {woman}) is not mutually acceptable")]
    Unacceptable { man: usize, woman: usize },
}

/// Failures shared by all solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("this solver needs strict preferences but the instance has ties")]
    Ties,
    #[error("decomposition: {0}")]
    Decomposition(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Invalid(String),
}

impl From<smtw_td::TdError> for SolveError {
    fn from(e: smtw_td::TdError) -> Self {
        SolveError::Decomposition(e.to_string())
    }
}
