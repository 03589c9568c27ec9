//! # curvsense
//!
//! Quantum probes constrained to curved surfaces, and how much they can tell
//! you about the surface radius.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: metric, shape operator, curvatures, the confinement
//!   potential and the Ricci scalar for the sphere, cylinder and torus.
//! - [`spectral`]: eigenmodes and eigenvalues of the free Hamiltonians on
//!   the sphere and the cylinder, plus quadrature grids.
//! - [`probe`]: probe-state preparation, unitary evolution and the analytic
//!   radius derivative of the evolved state.
//! - [`estimation`]: quantum Fisher information, position-measurement Fisher
//!   information, their ratio, sampling and maximum-likelihood estimation.
//! - [`magnetic`]: first-order perturbed eigenstates of a charged probe and
//!   the resulting stationary-state Fisher information.
//! - [`cli`]: experiment configuration, scans and CSV output behind the
//!   `curvsense` binary.
//!
//! Natural units (ħ = M = 1) are the default everywhere, but both constants
//! travel explicitly through [`Units`].

pub mod cli;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod magnetic;
pub mod optimize;
pub mod probe;
pub mod spectral;
mod units;

pub use error::{Error, Result};
pub use units::Units;

pub use num_complex::Complex64;
