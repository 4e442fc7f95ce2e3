use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not supported (expected 1, 2 or 3)")]
    Dimension(usize),
    #[error("level {level} exceeds the configured maximum {max} for n = {n}")]
    LevelTooLarge { n: usize, level: u32, max: u32 },
    #[error("cube level {cube} is finer than grid level {grid}")]
    LevelMismatch { cube: u32, grid: u32 },
    #[error("grids differ: (n = {0}, L = {1}) vs (n = {2}, L = {3})")]
    GridMismatch(usize, u32, usize, u32),
    #[error("index {0:?} is outside the grid")]
    Index(Vec<u32>),
    #[error("{0}")]
    Parameter(String),
    #[error("instance exceeds size caps: {0}")]
    TooLarge(String),
    #[error("empty candidate family")]
    EmptyCandidates,
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
