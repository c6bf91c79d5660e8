//! Semi-implicit pseudospectral solver for the 2D incompressible
//! Navier–Stokes equations in vorticity–streamfunction form on the periodic
//! torus `(0, 2π)^2`.
//!
//! The viscous term is treated implicitly and advection explicitly, so each
//! step is one diagonal solve in Fourier space. Two spatial realisations are
//! provided: a dealiased Fourier–Galerkin stepper ([`galerkin`]) and a
//! collocation stepper using the skew-symmetric advection form
//! ([`collocation`]). The [`stability`] module computes explicit long-time
//! stability budgets and checks the per-step energy inequalities online;
//! [`convergence`] measures temporal order and long-time statistics.

pub mod collocation;
pub mod convergence;
pub mod error;
pub mod forcing;
pub mod galerkin;
pub mod norms;
pub mod parallel;
pub mod runner;
pub mod spectral;
pub mod stability;
pub mod state;
pub mod stepper;

pub use error::{Error, Result};
pub use forcing::ForcingSpec;
pub use spectral::{PhysField, SpectralField, VelocityField, WaveGrid};
pub use state::SolverState;
pub use stepper::{Scheme, Stepper};
