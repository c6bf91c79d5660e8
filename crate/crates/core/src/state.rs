//! Solver state: vorticity with its derived streamfunction.

use crate::error::Result;
use crate::spectral::{solve_poisson, velocity_from_streamfunction, SpectralField, VelocityField};

/// Vorticity `ω^n` at time `t = t_n`, with `ψ` solving `-Δψ = ω`. The
/// streamfunction is always derived from `ω`, never set independently.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    omega: SpectralField,
    psi: SpectralField,
    t: f64,
    step: u64,
}

impl SolverState {
    /// Fails if `omega` carries a non-negligible mean; a roundoff-sized
    /// mean is removed.
    pub fn new(omega: SpectralField, t: f64, step: u64) -> Result<Self> {
        let psi = solve_poisson(&omega)?;
        Ok(Self {
            omega: omega.without_mean(),
            psi,
            t,
            step,
        })
    }

    pub fn initial(omega: SpectralField) -> Result<Self> {
        Self::new(omega, 0.0, 0)
    }

    pub fn omega(&self) -> &SpectralField {
        &self.omega
    }

    pub fn psi(&self) -> &SpectralField {
        &self.psi
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn velocity(&self) -> VelocityField {
        velocity_from_streamfunction(&self.psi)
    }

    pub fn into_omega(self) -> SpectralField {
        self.omega
    }
}
