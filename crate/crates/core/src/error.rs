use thiserror::Error;

use crate::operator::AxiomReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("duplicate state label {0:?}")]
    DuplicateLabel(String),
    #[error("a state space needs at least one state")]
    EmptyLabelList,
    #[error("state labels must be nonempty (position {0})")]
    EmptyLabel(usize),
    #[error("{requested} states exceeds the limit of {limit}")]
    TooManyStates { requested: usize, limit: usize },
    #[error("unknown state label {0:?}")]
    UnknownLabel(String),
    #[error("events or operators belong to different state spaces")]
    SpaceMismatch,
    #[error("operator table has {found} entries, expected {expected}")]
    WrongArity { expected: usize, found: usize },
    #[error("neighborhood {event} of state {state:?} {reason}")]
    InvariantViolation {
        state: String,
        event: String,
        reason: &'static str,
    },
    #[error("operator violates Truth")]
    NotTruthful(Box<AxiomReport>),
    #[error("operator violates Monotonicity")]
    NotMonotone(Box<AxiomReport>),
    #[error("missing required event parameter for {0}")]
    MissingParameter(&'static str),
    #[error("Eq1 is only stated for events other than Omega")]
    EIsOmega,
    #[error("bad introspection word at position {0}: expected 'K' or '~'")]
    BadWord(usize),
    #[error("lex error at position {0}")]
    LexError(usize),
    #[error("parse error at position {position}: expected {}", expected.join(" or "))]
    ParseError {
        position: usize,
        expected: Vec<String>,
    },
    #[error("unbound event name {0:?}")]
    UnboundName(String),
    #[error("no operator for stage {0}")]
    UnknownStage(String),
    #[error("invalid model name {0:?}")]
    InvalidName(String),
    #[error("a scenario needs at least two stages")]
    TooFewStages,
    #[error("invalid learning fact: {0}")]
    InvalidFact(&'static str),
    #[error("stage-0 operator violates {}", .0.axiom)]
    AxiomViolation(Box<AxiomReport>),
}
