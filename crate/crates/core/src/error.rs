use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {0} is not a positive integer (indices are 1-based)")]
    InvalidIndex(usize),

    #[error("index {0} appears more than once")]
    DuplicateIndex(usize),

    #[error("{what} must be strictly positive, got {value}")]
    NonPositive { what: &'static str, value: String },

    #[error("index {index} lies outside the window [1, {window}]")]
    OutsideWindow { index: usize, window: usize },

    #[error("modular space needs at least one exponent")]
    EmptyExponents,

    #[error("modular exponents must be strictly increasing positive integers")]
    ExponentsNotIncreasing,

    #[error("{engine} cannot be evaluated in {mode} arithmetic")]
    ModeUnsupported { engine: String, mode: &'static str },

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("linear program is {0}; the unit ball should be a bounded polytope")]
    LinearProgram(&'static str),

    #[error("invalid configuration field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("claim {claim} needs constant {name}, which was not supplied")]
    MissingConstant { claim: String, name: String },

    #[error("claim {0} received no constraint-valid instances")]
    EmptyInstanceStream(String),

    #[error("claim {claim} does not apply: {reason}")]
    NotApplicable { claim: String, reason: String },

    #[error("window {window} is too small: {reason}")]
    WindowTooSmall { window: usize, reason: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("unknown {what} `{name}`")]
    Unknown { what: &'static str, name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(what: &'static str, input: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        what,
        input: input.to_string(),
        reason: reason.into(),
    }
}
