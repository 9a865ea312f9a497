use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("query at t = {t} is beyond the path horizon {horizon} and the path is not frozen")]
    QueryBeyondHorizon { t: f64, horizon: f64 },

    #[error("paths live on incompatible time grids")]
    GridMismatch,

    #[error("paths cross at or after their common start time")]
    CrossingPaths,

    #[error("paths touch at t = {touch} and separate again afterwards")]
    NotCoalescing { touch: f64 },

    #[error("empty pair set")]
    EmptySet,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("bad field dimensions: {0}")]
    BadDimensions(String),

    #[error("site ({i}, {ell}) has the wrong parity for this field")]
    Parity { i: i64, ell: i64 },

    #[error("site ({i}, {ell}) lies outside the arrow field")]
    OutOfField { i: i64, ell: i64 },

    #[error("no lattice starting site falls inside the window")]
    NoStartingSites,

    #[error("alpha = {0} leaves no valid starting row")]
    AlphaTooSmall(f64),

    #[error("walk from lattice site {start} reached {reached}, wrapping a cylinder of width {width}")]
    WidthTooSmall { start: i64, reached: i64, width: i64 },

    #[error("dual paths from bottom site {site} did not close within the field")]
    PathsDidNotCoalesce { site: i64 },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
