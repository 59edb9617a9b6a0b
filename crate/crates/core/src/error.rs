use thiserror::Error;

/// Errors produced by construction, validation and the deciders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("axiom violation ({axiom}): {detail}")]
    AxiomViolation { axiom: String, detail: String },

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),

    #[error("{what} has size {size}, above the bound {bound}")]
    BoundExceeded {
        what: String,
        size: usize,
        bound: usize,
    },

    #[error("no s-unit exists for the given elements")]
    NotSUnital,

    #[error("operands live in different rings")]
    RingMismatch,

    #[error("components do not form a direct sum: {0}")]
    NotDirectSum(String),

    #[error("ideal is not invariant: {0}")]
    NotInvariant(String),

    #[error("ideal is not graded: {0}")]
    NotGraded(String),

    #[error("object `{0}` is not in G_0'")]
    ObjectNotInG0Prime(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("grading is not nearly epsilon-strong: {0}")]
    NotNearlyEpsilonStrong(String),

    #[error("internal disagreement: {0}")]
    InternalDisagreement(String),

    #[error("associativity failure: {0}")]
    AssociativityFailure(String),

    #[error("implication chain violated: {0}")]
    ChainViolation(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Stable name of the variant, for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "malformed_input",
            Error::AxiomViolation { .. } => "axiom_violation",
            Error::UnknownObject(_) => "unknown_object",
            Error::UnknownMorphism(_) => "unknown_morphism",
            Error::BoundExceeded { .. } => "bound_exceeded",
            Error::NotSUnital => "not_s_unital",
            Error::RingMismatch => "ring_mismatch",
            Error::NotDirectSum(_) => "not_direct_sum",
            Error::NotInvariant(_) => "not_invariant",
            Error::NotGraded(_) => "not_graded",
            Error::ObjectNotInG0Prime(_) => "object_not_in_support",
            Error::Degenerate(_) => "degenerate",
            Error::NotNearlyEpsilonStrong(_) => "not_nearly_epsilon_strong",
            Error::InternalDisagreement(_) => "internal_disagreement",
            Error::AssociativityFailure(_) => "associativity_failure",
            Error::ChainViolation(_) => "chain_violation",
            Error::Parse { .. } => "parse",
            Error::Schema(_) => "schema",
        }
    }

    /// Process exit code: 1 invalid input, 2 bound exceeded, 3 a disagreement
    /// between deciders that should agree.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BoundExceeded { .. } => 2,
            Error::InternalDisagreement(_) | Error::AssociativityFailure(_) | Error::ChainViolation(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn axiom(axiom: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::AxiomViolation {
            axiom: axiom.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn bound(what: impl Into<String>, size: usize, bound: usize) -> Self {
        Error::BoundExceeded {
            what: what.into(),
            size,
            bound,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
