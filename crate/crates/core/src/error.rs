use thiserror::Error;

use crate::qstate::Label;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("register size {0} out of range (1..=10)")]
    SizeOutOfRange(usize),

    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },

    #[error("duplicate label {0}")]
    DuplicateLabel(Label),

    #[error("label {0} is not in the register")]
    UnknownLabel(Label),

    #[error("registers share label {0}")]
    OverlappingLabels(Label),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("not a product state (residual {0:e})")]
    NotProductState(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NonUnitary(f64),

    #[error("angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("total outcome probability {0} deviates from 1")]
    ProbabilityLeak(f64),

    #[error("{0}")]
    InvalidChannel(String),

    #[error("invalid input state: {0}")]
    InvalidInput(String),

    #[error("{what} code {code} out of range")]
    CodeOutOfRange { what: &'static str, code: u8 },

    #[error("no exact correction (best fidelity {0})")]
    NoExactCorrection(f64),

    #[error("invalid measurement plan: {0}")]
    InvalidPlan(String),
}
