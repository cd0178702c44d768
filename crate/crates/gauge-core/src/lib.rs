//! Lattice gauge measures from heat kernels on compact structure groups.
//!
//! The crate provides the numerical core for building and verifying
//! gauge measures as projective limits over refining lattices:
//!
//! - [`group`]: exact arithmetic, Haar sampling, class coordinates,
//!   characters and Laplacian spectral data for U(1), SU(2) and SU(3);
//! - [`heat`]: heat-kernel densities in character-series and
//!   Poisson-resummed (theta) form, small-β asymptotics, normalization;
//! - [`lattice`]: the directed family of finite hypercubic lattices,
//!   one-plaquette refinement, coarsening projections and cylindrical
//!   pullbacks;
//! - [`measure`]: kinematical (product Haar) and interacting
//!   (heat-kernel weighted) measures, Metropolis sampling and the
//!   statistical consistency checks for the β → β/4 refinement rule;
//! - [`hida`]: finite truncations of the heat-kernel test-function
//!   norms, the projective-limit metric and the S-transform;
//! - [`strata`]: orbit-type classification of holonomy sets via
//!   numerical commutant dimension.
//!
//! The crate is `no_std` (with `alloc`); all IO, file formats and the
//! command-line front end live in the companion `gauge-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod group;
pub mod heat;
pub mod hida;
pub mod lattice;
pub mod linalg;
pub mod measure;
pub mod stats;
pub mod strata;

mod error;

pub use error::Error;

/// Convenience result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
