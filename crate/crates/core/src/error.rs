use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("unknown student `{0}`")]
    UnknownStudent(String),

    #[error("student index {0} is out of range")]
    StudentOutOfRange(usize),

    #[error("student `{0}` listed more than once")]
    DuplicateStudent(String),

    #[error("signature lengths differ ({left} vs {right})")]
    SignatureLength { left: usize, right: usize },

    #[error("selection ratio is undefined for an empty group")]
    EmptyGroup,

    #[error("invalid ratio: {0}")]
    InvalidRatio(String),

    #[error("upper target {upper} is below lower target {lower}")]
    InvalidBounds { upper: usize, lower: usize },

    #[error("invalid target vector: {0}")]
    InvalidTargets(String),

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("rank cost encoding overflows 128-bit arithmetic")]
    CostOverflow,

    #[error("invalid flow network: {0}")]
    InvalidNetwork(String),

    #[error("flow conservation violated: {0}")]
    FlowConservation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("unknown school `{0}`")]
    UnknownSchool(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Input-side errors (bad files, bad flags) as opposed to solver invariant breaches.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Invariant(_) | Error::FlowConservation(_) | Error::CostOverflow
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
