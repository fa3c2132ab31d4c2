use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate triangle: area {area:e} is below {threshold:e}")]
    DegenerateTriangle { area: f64, threshold: f64 },

    #[error("non-finite vertex coordinate")]
    NonFinite,

    #[error("shape parameters (r, s) = ({r}, {s}) lie outside 1 < r <= 2, 0 <= s < 1, r + s <= 2")]
    OutsideShapeRegion { r: f64, s: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("refinement level {level} outside 0..={max}")]
    LevelOutOfRange { level: u8, max: u8 },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
