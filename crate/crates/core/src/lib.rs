//! Classical engine for Betti numbers of triangulated closed manifolds.
//!
//! The pipeline deforms random cochains to their harmonic parts through the
//! discrete Hodge decomposition and reads Betti numbers off the rank of the
//! resulting harmonic matrix, cross-validated by an exact integer homology
//! oracle. A small dense simulator of block-encoding arithmetic checks the
//! scale bookkeeping of the matrix chain the decomposition relies on.

pub mod cli;
pub mod complex;
pub mod dec;
pub mod error;
pub mod exact;
pub mod generate;
pub mod hodge;
pub mod io;
pub mod qsvt;
pub mod rank;
pub mod report;
pub mod simplex;
pub mod solve;
pub mod sparse;

pub use complex::{AdjacencyMatrices, ManifoldReport, SimplicialComplex};
pub use error::{BettiError, Result};
pub use generate::Shape;
pub use simplex::Simplex;
