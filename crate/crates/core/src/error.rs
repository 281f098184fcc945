use thiserror::Error;

use crate::cavity::CavityError;
use crate::geometry::GeometryError;
use crate::particles::ParticleError;
use crate::report::ReportError;
use crate::solver::SolverError;

/// Pipeline error, prefixed with the module it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(GeometryError),
    #[error("cavity: {0}")]
    Cavity(#[from] CavityError),
    #[error("cavity: `{name}`: {source}")]
    CavityNamed { name: String, source: CavityError },
    #[error("particles: {0}")]
    Particles(ParticleError),
    #[error("solver: {0}")]
    Solver(#[from] SolverError),
    #[error("report: {0}")]
    Report(#[from] ReportError),
    #[error("export: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
}

impl From<GeometryError> for Error {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Cavity { name, source } => Error::CavityNamed { name, source },
            other => Error::Geometry(other),
        }
    }
}

impl From<ParticleError> for Error {
    fn from(e: ParticleError) -> Self {
        match e {
            ParticleError::Geometry(g) => g.into(),
            other => Error::Particles(other),
        }
    }
}
