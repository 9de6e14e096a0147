use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("group mismatch: {left} vs {right}")]
    GroupMismatch { left: String, right: String },
    #[error("neighborhood shapes cannot be mixed within group {0}")]
    ShapeMismatch(String),
    #[error("empty intersection in group {0}")]
    EmptyIntersection(String),
    #[error("neighborhood in group {0} has no admissible points")]
    EmptyNeighborhood(String),
    #[error("ordered product in group {0} is the identity")]
    ProductIsIdentity(String),
    #[error("word length {len} exceeds cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("position {index} out of range for word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("words have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("word is the identity")]
    WordIsIdentity,
    #[error("word already equals the target point")]
    PointsEqual,
    #[error("witness {index} has a value in the excluded set")]
    WitnessInExcluded { index: usize },
    #[error("neighborhood variants differ")]
    VariantMismatch,
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("certificate was made for configuration {found}, loaded configuration is {expected}")]
    ConfigMismatch { expected: String, found: String },
    #[error("exhaustive checking needs every neighborhood to be a finite set")]
    ExhaustiveNotFinite,
    #[error("parse error at token {token} ({text:?}): {reason}")]
    Parse {
        token: usize,
        text: String,
        reason: String,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}
