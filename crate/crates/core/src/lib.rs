//! Time averages of quantum walks.
//!
//! The crate computes long-time averages of observables under unitary
//! Schrödinger dynamics in a few settings where the averages have closed
//! forms:
//!
//! * [`spectral`]: dense Hermitian operators, spectral projectors and the
//!   time-average kernels shared by everything else.
//! * [`lattice`]: the discrete torus `Z^d / N Z^d` with its adjacency
//!   operator, diagonalized by the DFT.
//! * [`crystal`]: periodic graphs through the Floquet transform.
//! * [`torus`]: spectrally truncated states of the flat Laplacian on a
//!   continuous torus.
//! * [`sphere`]: zonal harmonics and the projection weights of the Laplacian
//!   on spheres.

pub mod crystal;
mod error;
mod fourier;
pub mod kernel;
pub mod lattice;
pub mod quadrature;
pub mod spectral;
pub mod sphere;
pub mod torus;

pub use error::{Error, Result};
pub use num_complex::Complex64;
