use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("relation {name} used with arity {found}, previously {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("fact {0} is both endogenous and exogenous")]
    DuplicateFact(String),

    #[error("{what} is {size}, above the limit of {limit} (set MINSUP_GUARD_OVERRIDE=1 to lift; may be very slow)")]
    Guard {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("fact {0} is not an endogenous fact of the database")]
    NotEndogenous(String),

    #[error("weight table has no entry for k={k}, n={n}")]
    MissingWeight { k: usize, n: usize },

    #[error("coefficient c({j},{m}) is missing or not positive")]
    BadCoefficient { j: usize, m: usize },

    #[error("{0} is only defined without exogenous facts")]
    ExogenousPresent(&'static str),

    #[error("{0} is undefined when the exogenous facts satisfy the query")]
    ExogenousSatisfies(&'static str),

    #[error("database is not acyclic; cycle through {}", .0.join(" -> "))]
    Cyclic(Vec<String>),

    #[error("fact {0} is not binary; path queries need a graph database")]
    NonBinary(String),

    #[error("malformed score vector: {0}")]
    Malformed(String),

    #[error("graph is not bipartite")]
    NotBipartite,

    #[error("relation {0} is missing from the schema")]
    MissingRelation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("count overflow")]
    Overflow,
}

impl Error {
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard { .. })
    }

    pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            msg: msg.into(),
        }
    }
}
