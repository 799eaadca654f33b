use thiserror::Error;

use crate::boundary::BoundaryError;
use crate::complex::{ComplexError, ValidationError};
use crate::generate::GenerateError;
use crate::oracle::OracleError;
use crate::polygon::PolygonError;
use crate::structures::StructureError;
use crate::theta::ThetaError;
use crate::unfold::UnfoldError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub const EXIT_INVALID_INPUT: i32 = 1;
pub const EXIT_CONTRADICTION: i32 = 2;
pub const EXIT_IO: i32 = 3;

impl Error {
    /// Process exit code: 1 for bad input, 2 for a broken invariant, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => EXIT_IO,
            Error::Boundary(BoundaryError::InternalContradiction { .. })
            | Error::Unfold(_)
            | Error::Polygon(_)
            | Error::Structure(StructureError::NotIsometric { .. })
            | Error::Structure(StructureError::NotATree { .. }) => EXIT_CONTRADICTION,
            _ => EXIT_INVALID_INPUT,
        }
    }
}
