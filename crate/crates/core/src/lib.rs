//! Exact two-point l2 geodesic queries in CAT(0) rectangular complexes.
//!
//! A [`QueryIndex`] holds a validated complex, its Θ-classes and a distance
//! structure. A query selects gate vertices, walks the boundary of their
//! interval, unfolds it into the plane and runs a funnel pass per block.

pub mod bench;
pub mod boundary;
pub mod complex;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod oracle;
pub mod polygon;
pub mod structures;
pub mod theta;
pub mod unfold;

pub use complex::{validate_cat0, PointSpec, RawComplex, RectComplex, ValidationConfig, ValidationReport};
pub use engine::{Breakpoint, GeodesicPath, QueryIndex};
pub use error::{Error, Result};
pub use structures::{QueryStructure, StructureKind};
