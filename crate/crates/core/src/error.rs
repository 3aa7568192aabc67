use thiserror::Error;

/// Errors raised by graph construction, groupoid operations and the
/// counting routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph has no edges")]
    NoEdges,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge `{0}`")]
    DuplicateEdge(String),
    #[error("label index {label} outside ±1..±{max}")]
    LabelOutOfRange { label: i32, max: usize },
    #[error("invalid weighting: {0}")]
    InvalidWeighting(String),
    #[error("operation undefined on the empty element")]
    EmptyElement,
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration needs {required} items but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid multiset: {0}")]
    InvalidMultiset(String),
    #[error("moment of order {0} not supplied")]
    MissingMoment(usize),
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
