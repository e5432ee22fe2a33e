use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading terrain, building geometry, costing a design,
/// or running a solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed terrain: {0}")]
    MalformedTerrain(String),

    #[error("terrain data error: {0}")]
    TerrainData(String),

    #[error("point ({x}, {y}) lies outside the terrain footprint")]
    OutOfBounds { x: f64, y: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("parameter {value} outside domain [{lo}, {hi}]")]
    ParameterOutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("seeding failed: {0}")]
    Seeding(String),

    #[error("solver configuration: {0}")]
    SolverConfig(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI (and mirrored by the C API) for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::InvalidDesign(_) => 2,
            Error::MalformedTerrain(_) | Error::TerrainData(_) => 3,
            Error::Io { .. } => 3,
            Error::Output { .. } => 1,
            Error::Seeding(_) => 4,
            Error::SolverConfig(_)
            | Error::OutOfBounds { .. }
            | Error::DegenerateGeometry(_)
            | Error::IndexOutOfRange(_)
            | Error::ParameterOutOfDomain { .. } => 5,
        }
    }
}
