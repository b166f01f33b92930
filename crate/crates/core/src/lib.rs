//! Periodic traveling waves of Gardner-Ostrovsky type equations.
//!
//! The equation `(u_t + n(u)_x + β u_xxx)_x = γ u` with a polynomial
//! nonlinearity n admits 2π-periodic traveling waves `u(t,x) = φ(x - ct)`.
//! This crate computes them by Fourier collocation and Newton continuation
//! in the wave speed, starting from the local bifurcation at `c = 1 - β`,
//! and verifies their regularity (peak/cusp Hölder laws), amplitude bounds
//! and symmetry, including the explicit highest waves of the reduced and
//! modified reduced Ostrovsky equations at speeds π²/9 and π²/8.
//!
//! Module map:
//! - [`fourier`]: collocation grid, spectra, multiplier operators, kernels
//! - [`model`]: the equation, its steady residual and linearization
//! - [`solver`]: Newton solve with amplitude normalization, continuation
//! - [`analysis`]: regularity, amplitude and symmetry diagnostics
//! - [`exact`]: closed-form highest waves and the steady ODE Hamiltonian
//! - [`evolution`]: pseudospectral time integration of the full equation

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod exact;
pub mod fourier;
pub mod model;
pub mod solver;

pub use error::{CoreError, Result};
pub use fourier::{TorusGrid, WaveProfile};
pub use model::{Dispersion, ModelParams, SteadyState};
