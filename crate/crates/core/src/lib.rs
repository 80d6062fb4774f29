//! Anti-Kaehler complexifications of pseudo-Riemannian symmetric spaces.

pub mod catalog;
pub mod chart;
pub mod cli;
pub mod contour;
pub mod error;
pub mod focal;
pub mod holo;
pub mod jacobi;
pub mod lie;
pub mod linalg;
pub mod orbit;
pub mod report;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
pub use lie::{LieAlgebra, SymmetricPair};
pub use space::{ComplexGeodesic, SpacePoint, SymmetricSpace, TangentVector};
