//! Weighted numerical ranges `W(A;c)` of complex matrices: support functions, convex
//! regions, c-values and numerical checks of boundary-coincidence results.

pub mod cvalues;
pub mod eigen;
pub mod error;
pub mod io;
pub mod matrix;
pub mod region;
pub mod support;
pub mod verify;

pub use eigen::{eig_general, eig_hermitian, HermitianEigen, Spectrum};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, HermitianMatrix};
pub use region::{build_region, ConvexRegion, RegionKind};
pub use support::{weighted_support, Support, WeightVector};
