use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the workbench.
///
/// Input problems (bad specs, budgets, preconditions) are separated from
/// internal invariant failures so that front ends can map them onto
/// different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },

    #[error("{what} of size {size} exceeds the budget of {limit}")]
    Budget {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    #[error("subgroups belong to different parent groups")]
    MismatchedParent,

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("operation requires an abelian group")]
    NotAbelian,

    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),

    #[error("invalid lattice: {0}")]
    Lattice(String),

    #[error("noncommuting terms: {0}")]
    Audit(String),

    #[error("anyon cannot be used here: {0}")]
    NotCondensable(String),

    #[error("invalid string operator: {0}")]
    InvalidPath(String),

    #[error("ground-state methods disagree: {0}")]
    MethodDisagreement(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for failures of internal consistency checks, as opposed to bad input.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(
            self,
            Error::Invariant(_) | Error::MethodDisagreement(_) | Error::Audit(_)
        )
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
