//! Probability measures on the unit sphere of a finite-dimensional complex
//! Hilbert space.
//!
//! The centerpiece is the GAP family: for any density matrix `rho`, the
//! Gaussian measure with covariance `rho` is reweighted by the squared norm
//! (the "adjustment") and radially projected to the sphere, producing a
//! measure whose covariance is exactly `rho` again. The crate provides exact
//! samplers and closed-form densities for these measures, the competing
//! thermal constructions (eigenvector mixtures, fixed-modulus torus measures,
//! coherent-state distributions, and the Brody-Hughston density), conditional
//! wave functions of subsystems, and a statistics toolkit for verifying the
//! distributional claims numerically.
//!
//! Everything is deterministic given an [`hilbert::RngStream`]; see the
//! `gapsphere-cli` crate for seeded experiment runners.

pub mod ensembles;
pub mod error;
pub mod gap;
pub mod hilbert;
pub mod stats;
pub mod subsystem;
pub mod twolevel;

pub use error::{Error, Result};
