//! Semi-implicit time stepping shared by both spatial discretizations:
//! explicit advection and forcing, implicit diffusion solved diagonally in
//! coefficient space.

use crate::collocation::CollocationKernel;
use crate::error::{Error, Result};
use crate::forcing::{ForcingSpec, ResolvedForcing};
use crate::galerkin::GalerkinKernel;
use crate::spectral::{SpectralField, WaveGrid};
use crate::state::SolverState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Galerkin,
    Collocation,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Galerkin => "galerkin",
            Self::Collocation => "collocation",
        }
    }

    /// Byte identifying the scheme in checkpoints.
    pub fn tag(self) -> u8 {
        match self {
            Self::Galerkin => 0,
            Self::Collocation => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Self::Galerkin),
            1 => Some(Self::Collocation),
            _ => None,
        }
    }

    /// Point count used when the configuration leaves it open: the padded
    /// product grid for Galerkin, the critical grid for collocation.
    pub fn default_points(self, n: usize) -> usize {
        match self {
            Self::Galerkin => crate::spectral::dealias_size(n),
            Self::Collocation => 2 * n + 1,
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "galerkin" => Ok(Self::Galerkin),
            "collocation" => Ok(Self::Collocation),
            _ => Err(Error::invalid(format!(
                "unknown scheme '{s}' (expected galerkin or collocation)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `ω̂' = (ω̂ - dt N̂ + dt f̂) / (1 + ν dt (k² + l²))` with the mean kept at zero.
pub(crate) fn implicit_update(
    omega: &SpectralField,
    nonlinear: &SpectralField,
    forcing: Option<(&SpectralField, f64)>,
    dt: f64,
    nu: f64,
) -> SpectralField {
    let grid = omega.grid();
    let mut out = SpectralField::zeros(grid);
    let w = omega.coefficients();
    let nl = nonlinear.coefficients();
    let dst = out.coefficients_mut();
    for (k, l, i) in grid.modes() {
        if k == 0 && l == 0 {
            continue;
        }
        let mut rhs = w[i] - nl[i] * dt;
        if let Some((f, s)) = forcing {
            rhs += f.coefficients()[i] * (dt * s);
        }
        let k2 = (k * k + l * l) as f64;
        dst[i] = rhs / (1.0 + nu * dt * k2);
    }
    out
}

pub(crate) fn check_step_params(dt: f64, nu: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::invalid(format!("nu must be positive, got {nu}")));
    }
    Ok(())
}

pub(crate) fn advance(
    state: &SolverState,
    nonlinear: &SpectralField,
    forcing: &ResolvedForcing,
    dt: f64,
    nu: f64,
) -> Result<SolverState> {
    let f = (!forcing.is_zero()).then(|| (forcing.base(), forcing.factor(state.t())));
    let omega = implicit_update(state.omega(), nonlinear, f, dt, nu);
    let step = state.step() + 1;
    if !omega.is_finite() {
        return Err(Error::NumericalFailure {
            step,
            last_checkpoint: None,
        });
    }
    SolverState::new(omega, state.t() + dt, step)
}

#[derive(Debug, Clone)]
enum Kernel {
    Galerkin(GalerkinKernel),
    Collocation(CollocationKernel),
}

/// Reusable stepper holding FFT plans and the resolved forcing for a fixed
/// scheme, grid, `dt` and `ν`.
#[derive(Debug, Clone)]
pub struct Stepper {
    scheme: Scheme,
    grid: WaveGrid,
    kernel: Kernel,
    forcing: ResolvedForcing,
    dt: f64,
    nu: f64,
}

impl Stepper {
    pub fn new(scheme: Scheme, grid: WaveGrid, forcing: &ForcingSpec, dt: f64, nu: f64) -> Result<Self> {
        check_step_params(dt, nu)?;
        let kernel = match scheme {
            Scheme::Galerkin => Kernel::Galerkin(GalerkinKernel::new(grid)),
            Scheme::Collocation => Kernel::Collocation(CollocationKernel::new(grid)),
        };
        Ok(Self {
            scheme,
            grid,
            kernel,
            forcing: forcing.resolve(grid)?,
            dt,
            nu,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn grid(&self) -> WaveGrid {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn forcing(&self) -> &ResolvedForcing {
        &self.forcing
    }

    /// The scheme's explicit advection term at `state`.
    pub fn nonlinear(&mut self, state: &SolverState) -> Result<SpectralField> {
        if state.omega().grid() != self.grid {
            return Err(Error::invalid(format!(
                "state on N = {}, P = {} does not match the stepper grid N = {}, P = {}",
                state.omega().n(),
                state.omega().grid().p(),
                self.grid.n(),
                self.grid.p()
            )));
        }
        Ok(match &mut self.kernel {
            Kernel::Galerkin(k) => k.evaluate(state.psi(), state.omega()),
            Kernel::Collocation(k) => k.evaluate_from_psi(state.psi(), state.omega()),
        })
    }

    pub fn step(&mut self, state: &SolverState) -> Result<SolverState> {
        let nl = self.nonlinear(state)?;
        advance(state, &nl, &self.forcing, self.dt, self.nu)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;

    use super::*;
    use crate::norms::l2_norm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scheme_names_and_tags() {
        for s in [Scheme::Galerkin, Scheme::Collocation] {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
            assert_eq!(Scheme::from_tag(s.tag()), Some(s));
        }
        assert!("spectral".parse::<Scheme>().is_err());
        assert_eq!(Scheme::Galerkin.default_points(32), 128);
        assert_eq!(Scheme::Collocation.default_points(8), 17);
    }

    #[test]
    fn steady_state_is_fixed_point() {
        // f = ν|k|² ω* with ω* = sin x, for either scheme and any dt.
        let nu = 0.3;
        let forcing = ForcingSpec::steady(vec![(1, 0, c(0.0, -0.5 * nu))]).unwrap();
        for scheme in [Scheme::Galerkin, Scheme::Collocation] {
            let grid = WaveGrid::new(4, scheme.default_points(4)).unwrap();
            let w = SpectralField::from_modes(grid, &[(1, 0, c(0.0, -0.5))]).unwrap();
            for dt in [0.01, 0.7, 5.0] {
                let mut st = Stepper::new(scheme, grid, &forcing, dt, nu).unwrap();
                let s0 = SolverState::initial(w.clone()).unwrap();
                let s1 = st.step(&s0).unwrap();
                let d = s1.omega().sub(&w).unwrap();
                assert!(d.max_abs() < 1e-16);
                assert!((l2_norm(s1.omega()) - 2f64.sqrt() * PI).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = WaveGrid::critical(4).unwrap();
        assert!(Stepper::new(Scheme::Collocation, g, &ForcingSpec::none(), -0.1, 1.0).is_err());
        assert!(Stepper::new(Scheme::Collocation, g, &ForcingSpec::none(), 0.1, 0.0).is_err());
    }

    #[test]
    fn blow_up_reports_step() {
        let g = WaveGrid::critical(4).unwrap();
        let mut w = SpectralField::zeros(g);
        w.set_pair(1, 2, c(1e300, 1e300));
        let mut st = Stepper::new(Scheme::Collocation, g, &ForcingSpec::none(), 1e10, 1e-300).unwrap();
        let s0 = SolverState::new(w, 0.0, 41).unwrap();
        match st.step(&s0) {
            Err(Error::NumericalFailure { step, .. }) => assert_eq!(step, 42),
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }
}
