//! Time-harmonic Kirchhoff-Love plate waveguides in the strip ℝ × (0, 1).
//!
//! The plate equation `Δ²u − k⁴u = f` is studied with simply supported or
//! clamped lateral edges. The crate provides:
//!
//! * [`transverse`]: closed-form transverse bases, dispersion determinants,
//!   kernel vectors and a Hermite solver for the transverse symbol;
//! * [`spectrum`]: modal exponents, threshold wavenumbers, multiplicities;
//! * [`dtn`]: Dirichlet-to-Neumann blocks for simply supported strips;
//! * [`fem`]: Bogner-Fox-Schmit plate elements with DtN coupling;
//! * [`scattering`]: lifted sources and scattering matrices;
//! * [`clamped_strip`]: the contour (inverse Laplace) solver for clamped
//!   strips, residues and the symplectic flux form;
//! * [`physics`]: group and phase velocities, limiting absorption.

pub mod banded;
pub mod clamped_strip;
pub mod cutoff;
pub mod dtn;
pub mod error;
pub mod fem;
pub mod hermite;
pub mod numerics;
pub mod physics;
pub mod scattering;
pub mod spectrum;
pub mod transverse;

pub use error::{Error, Result};
pub use numerics::C64;
pub use transverse::BoundaryKind;
