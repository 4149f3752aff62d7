//! Pseudospectral laboratory for one-dimensional nonlinear dispersive equations.
//!
//! The crate evolves five model equations on a uniform periodic grid:
//!
//! * the k-generalized Korteweg-de Vries equation  `u_t + u_xxx + u^k u_x = 0`,
//! * a quasilinear KdV-type model                  `u_t + (1 + (u_xx)^2) u_xxx = -eps u_xxxx`,
//! * the Benjamin-Bona-Mahony equation             `u_t = -d/dx (1 - d2/dx2)^{-1} (u + u^2/2)`,
//! * the Degasperis-Procesi equation               `u_t + u u_x + (3/2) d/dx (1 - d2/dx2)^{-1} (u^2) = 0`,
//! * a one-dimensional Brinkman porous-media model `rho_t = d/dx (rho (1 - d2/dx2)^{-1} d/dx (rho^2))`,
//!
//! and provides the measurement tools that make one-sided regularity, local
//! smoothing, and singularity transport observable at desk scale: cutoff
//! families with verified derivative bounds, solution-dependent weights,
//! half-line derivative energies, corner detectors, characteristic flows and
//! multi-peakon dynamics, and the Airy group with its exponentially weighted
//! factorization.
//!
//! All state lives in [`fieldkit::RealField`]; every operation is a pure
//! function of its inputs, so values can be shared read-only across threads.

pub mod airy;
pub mod diagnostics;
pub mod error;
pub mod fieldkit;
pub mod flow;
pub mod solvers;

pub use error::Error;
pub use fieldkit::{Grid, RealField, Spectrum};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
