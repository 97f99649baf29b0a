//! Topological invariants of finite tight-binding lattice models.
//!
//! The crate computes the same integer invariant along independent routes:
//! Brillouin-zone integrals ([`kspace`]), Fredholm index pairings on finite
//! samples ([`realspace`]), signatures and Pfaffian signs of the spectral
//! localizer ([`localizer`]), and boundary probes ([`bbc`]). The [`harness`]
//! module drives parameter sweeps from a config file.

pub mod error;
pub mod linalg;
pub mod models;
pub mod kspace;
pub mod realspace;
pub mod localizer;
pub mod bbc;
pub mod harness;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
