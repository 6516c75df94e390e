//! Analytic broken-ray-transform (BRT) toolkit.
//!
//! The crate synthesizes exact cone-beam / broken-ray / Radon data from
//! ellipse phantoms, extends truncated data using the shadow-region
//! identities, bounds the data support with a four-impulse PSF, and
//! reconstructs attenuation images by regularized two-dimensional Fourier
//! inversion.

pub mod error;
pub mod extend;
pub mod filter;
pub mod geometry;
pub mod grid;
pub mod invert;
pub mod phantom;
pub mod pipeline;
pub mod spectral;
pub mod transforms;

pub use error::{BrtError, Result};
pub use geometry::{Direction, Parallelogram, Vec2};
pub use grid::{Field2D, Grid2D};
pub use phantom::{shepp_logan, Ellipse, Phantom};
pub use spectral::Spectrum2D;

/// Circumscribed parallelogram of a phantom's support for two directions,
/// per the centered-support convention.
pub fn circumscribed_parallelogram(
    phantom: &Phantom,
    theta_i: &Direction,
    theta_j: &Direction,
) -> Result<Parallelogram> {
    let (lo_i, hi_i) = phantom.extent_along(theta_i.perp())?;
    let (lo_j, hi_j) = phantom.extent_along(theta_j.perp())?;
    Parallelogram::from_extents(*theta_i, *theta_j, hi_i - lo_i, hi_j - lo_j)
}
