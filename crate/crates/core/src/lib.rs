//! Weighted Bergman kernels of planar domains.
//!
//! Kernels are available in closed form on model domains ([`kernels_closed`])
//! and numerically as reproducing kernels of truncated monomial spaces
//! ([`kernels_numeric`]). [`experiments`] runs boundary-sequence studies that
//! compare weighted and unweighted kernels near a smooth boundary point.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod jet;
pub mod kernels_closed;
pub mod kernels_numeric;
pub mod quadrature;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{cpt, AffineMap, Biholomorphism, ComplexPoint, Cut, Domain, MobiusMap, PixelRegion, Rect};
pub use kernels_closed::{ClosedKernel, Kernel};
pub use kernels_numeric::{BasisSpec, NumericConfig, NumericKernel};
pub use quadrature::Quadrature;
pub use weights::Weight;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
