//! Body forcing: steady mode sets, Kolmogorov shear forcing and
//! time-harmonic modulation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::norms::l2_norm;
use crate::spectral::{SpectralField, WaveGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcingKind {
    None,
    SteadyModes,
    Kolmogorov,
    TimeHarmonic,
}

impl ForcingKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::SteadyModes => "steady_modes",
            Self::Kolmogorov => "kolmogorov",
            Self::TimeHarmonic => "time_harmonic",
        }
    }
}

impl std::str::FromStr for ForcingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::None, Self::SteadyModes, Self::Kolmogorov, Self::TimeHarmonic]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown forcing kind '{s}'")))
    }
}

/// Forcing as a list of Fourier amplitudes `(k, l, c)`; conjugate partners
/// are implied. Time-harmonic forcing is `base(x) cos(frequency t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingSpec {
    kind: ForcingKind,
    modes: Vec<(i64, i64, Complex64)>,
    frequency: f64,
}

impl ForcingSpec {
    pub fn none() -> Self {
        Self {
            kind: ForcingKind::None,
            modes: Vec::new(),
            frequency: 0.0,
        }
    }

    pub fn steady(modes: Vec<(i64, i64, Complex64)>) -> Result<Self> {
        Self::with_modes(ForcingKind::SteadyModes, modes, 0.0)
    }

    /// `amplitude · sin(wavenumber · y)`.
    pub fn kolmogorov(amplitude: f64, wavenumber: i64) -> Result<Self> {
        if wavenumber <= 0 {
            return Err(Error::invalid("Kolmogorov wavenumber must be positive"));
        }
        Self::with_modes(
            ForcingKind::Kolmogorov,
            vec![(0, wavenumber, Complex64::new(0.0, -0.5 * amplitude))],
            0.0,
        )
    }

    pub fn time_harmonic(modes: Vec<(i64, i64, Complex64)>, frequency: f64) -> Result<Self> {
        if !frequency.is_finite() {
            return Err(Error::invalid("forcing frequency must be finite"));
        }
        Self::with_modes(ForcingKind::TimeHarmonic, modes, frequency)
    }

    fn with_modes(kind: ForcingKind, modes: Vec<(i64, i64, Complex64)>, frequency: f64) -> Result<Self> {
        for &(k, l, c) in &modes {
            if k == 0 && l == 0 && c.norm() > 0.0 {
                return Err(Error::invalid("forcing must be mean-zero: mode (0, 0) is not allowed"));
            }
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::invalid(format!("forcing amplitude of mode ({k}, {l}) is not finite")));
            }
        }
        Ok(Self { kind, modes, frequency })
    }

    pub fn kind(&self) -> ForcingKind {
        self.kind
    }

    pub fn modes(&self) -> &[(i64, i64, Complex64)] {
        &self.modes
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// Spatial profile on `grid`'s mode set.
    pub fn resolve(&self, grid: WaveGrid) -> Result<ResolvedForcing> {
        let base = SpectralField::from_modes(grid, &self.modes)?;
        let frequency = (self.kind == ForcingKind::TimeHarmonic).then_some(self.frequency);
        let zero = base.coefficients().iter().all(|c| c.norm() == 0.0);
        Ok(ResolvedForcing { base, frequency, zero })
    }
}

impl Default for ForcingSpec {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedForcing {
    base: SpectralField,
    frequency: Option<f64>,
    zero: bool,
}

impl ResolvedForcing {
    pub fn base(&self) -> &SpectralField {
        &self.base
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Temporal factor multiplying the base profile at time `t`.
    pub fn factor(&self, t: f64) -> f64 {
        match self.frequency {
            Some(w) => (w * t).cos(),
            None => 1.0,
        }
    }

    pub fn at(&self, t: f64) -> SpectralField {
        self.base.scaled(self.factor(t))
    }

    pub fn l2_at(&self, t: f64) -> f64 {
        l2_norm(&self.base) * self.factor(t).abs()
    }

    /// `sup_t ‖f(t)‖₂`.
    pub fn sup_l2(&self) -> f64 {
        l2_norm(&self.base)
    }
}

/// `‖A sin(n y)‖₂ = √2 π |A|` on the torus.
pub fn kolmogorov_l2(amplitude: f64) -> f64 {
    2f64.sqrt() * PI * amplitude.abs()
}
