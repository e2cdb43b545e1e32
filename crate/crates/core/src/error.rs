use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// Callers that need a coarse classification (the CLI maps these onto exit
/// codes) use [`Error::is_budget`].
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("metric axiom violated: {0}")]
    Metric(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("map is not nonexpanding: {0}")]
    Expanding(String),
    #[error("operation undefined while evaluating `{term}`: {reason}")]
    Undefined { term: String, reason: String },
    #[error("budget exceeded: {what} (limit {limit})")]
    Budget { what: String, limit: usize },
    #[error("fixed point did not converge within {passes} passes")]
    Convergence { passes: u64 },
}

impl Error {
    pub fn budget(what: impl Into<String>, limit: usize) -> Error {
        Error::Budget { what: what.into(), limit }
    }

    pub fn input(msg: impl Into<String>) -> Error {
        Error::Input(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::Convergence { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
