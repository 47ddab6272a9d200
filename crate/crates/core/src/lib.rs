//! Pseudospectral simulation and wave-breaking analysis for the spatially
//! periodic Degasperis-Procesi equation
//!
//! ```text
//! v_t + v v_x + ∂x p * (3/2 v² + 3κ v) = 0,   v(t, x + 1) = v(t, x),
//! ```
//!
//! where `p(x) = cosh(x - ⌊x⌋ - 1/2) / (2 sinh(1/2))` is the kernel of
//! `(1 - ∂x²)⁻¹` on the circle.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grid, FFTs, derivatives, the kernel and its inverse,
//!   trigonometric interpolation.
//! * [`solver`]: RK4 time stepping, momentum, breaking detection.
//! * [`characteristics`]: flow map tracking and the Riccati audit.
//! * [`analysis`]: slope criterion scans, lifespan bounds, envelope and
//!   Liouville probes, conservation reports.
//! * [`scenario`]: config parsing, initial data, orchestration and CSV.

pub mod analysis;
pub mod characteristics;
pub mod error;
pub mod scenario;
pub mod solver;
pub mod spectral;

pub use error::{DpError, Result};
pub use spectral::{Grid, PeriodicField, SpectralField};
