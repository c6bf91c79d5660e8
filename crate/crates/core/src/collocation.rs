//! Collocation advection in skew-symmetric form,
//! `½(u·∇ω + ∇·(uω))`, with products taken pointwise on the grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::norms::l2_norm;
use crate::spectral::{velocity_from_streamfunction, Fft2d, SpectralField, VelocityField, WaveGrid};
use crate::state::SolverState;
use crate::stepper::{advance, check_step_params};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Grid values of the two halves of the skew form: advective `u·∇ω` and
/// divergence `D_x(uω) + D_y(vω)`, both on the kernel's `P²` points.
struct GridTerms {
    omega: Vec<f64>,
    adv: Vec<f64>,
    div: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct CollocationKernel {
    grid: WaveGrid,
    fft: Fft2d,
    bufs: [Vec<Complex64>; 3],
    scratch: [Vec<Complex64>; 4],
}

impl CollocationKernel {
    /// Products are taken on `grid.p()` points. The critical grid `2N + 1`
    /// is the collocation scheme proper; grids with `P >= 3N + 1` remove
    /// aliasing and exist for diagnostics.
    pub(crate) fn new(grid: WaveGrid) -> Self {
        let fft = Fft2d::new(grid.p());
        let z = vec![Complex64::new(0.0, 0.0); grid.num_modes()];
        Self {
            grid,
            bufs: [fft.buffer(), fft.buffer(), fft.buffer()],
            fft,
            scratch: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    pub(crate) fn evaluate_from_psi(&mut self, psi: &SpectralField, omega: &SpectralField) -> SpectralField {
        let [u, v, _, _] = &mut self.scratch;
        let p = psi.coefficients();
        for (k, l, i) in self.grid.modes() {
            u[i] = -I * l as f64 * p[i];
            v[i] = I * k as f64 * p[i];
        }
        self.evaluate_scratch_velocity(omega)
    }

    pub(crate) fn evaluate(&mut self, vel: &VelocityField, omega: &SpectralField) -> SpectralField {
        self.scratch[0].copy_from_slice(vel.u.coefficients());
        self.scratch[1].copy_from_slice(vel.v.coefficients());
        self.evaluate_scratch_velocity(omega)
    }

    /// Fills `bufs[0] = u + iv`, `bufs[1] = ω_x + iω_y`, `bufs[2] = ω` on the grid.
    fn synthesize_fields(&mut self, omega: &SpectralField) {
        let n = self.grid.n();
        let [u, v, wx, wy] = &mut self.scratch;
        let w = omega.coefficients();
        for (k, l, i) in self.grid.modes() {
            wx[i] = I * k as f64 * w[i];
            wy[i] = I * l as f64 * w[i];
        }
        let [b0, b1, b2] = &mut self.bufs;
        self.fft.synthesize_pair(u, v, n, b0);
        self.fft.synthesize_pair(wx, wy, n, b1);
        self.fft.synthesize(w, n, b2);
    }

    fn evaluate_scratch_velocity(&mut self, omega: &SpectralField) -> SpectralField {
        let n = self.grid.n();
        self.synthesize_fields(omega);
        let [b0, b1, b2] = &mut self.bufs;
        for ((uv, g), w) in b0.iter_mut().zip(b1.iter_mut()).zip(b2.iter()) {
            let adv = uv.re * g.re + uv.im * g.im;
            *uv = Complex64::new(uv.re * w.re, uv.im * w.re);
            *g = Complex64::new(adv, 0.0);
        }
        let [fa, fb, adv_hat, _] = &mut self.scratch;
        self.fft.analyze_pair(b0, n, fa, fb);
        self.fft.analyze(b1, n, adv_hat);
        let mut out = SpectralField::zeros(self.grid);
        let dst = out.coefficients_mut();
        for (k, l, i) in self.grid.modes() {
            dst[i] = 0.5 * (adv_hat[i] + I * k as f64 * fa[i] + I * l as f64 * fb[i]);
        }
        out.zero_mean();
        out
    }

    /// Pointwise advective and divergence terms, for orthogonality checks
    /// by direct grid summation.
    fn grid_terms(&mut self, vel: &VelocityField, omega: &SpectralField) -> GridTerms {
        let n = self.grid.n();
        self.scratch[0].copy_from_slice(vel.u.coefficients());
        self.scratch[1].copy_from_slice(vel.v.coefficients());
        self.synthesize_fields(omega);
        let [b0, b1, b2] = &mut self.bufs;
        let omega_vals: Vec<f64> = b2.iter().map(|z| z.re).collect();
        let adv: Vec<f64> = b0.iter().zip(b1.iter()).map(|(a, g)| a.re * g.re + a.im * g.im).collect();
        for (uv, w) in b0.iter_mut().zip(&omega_vals) {
            *uv = Complex64::new(uv.re * w, uv.im * w);
        }
        let [fa, fb, _, _] = &mut self.scratch;
        self.fft.analyze_pair(b0, n, fa, fb);
        let [fa, fb, d, _] = &mut self.scratch;
        for (k, l, i) in self.grid.modes() {
            d[i] = I * k as f64 * fa[i] + I * l as f64 * fb[i];
        }
        let [_, _, d, _] = &self.scratch;
        self.fft.synthesize(d, n, b2);
        let div = b2.iter().map(|z| z.re).collect();
        GridTerms {
            omega: omega_vals,
            adv,
            div,
        }
    }
}

/// `½(u·∇_N ω + D_x(uω) + D_y(vω))` with pointwise products on `grid`,
/// truncated to `[-N, N]²` with the mean removed.
pub fn nonlinear_skew(u: &VelocityField, omega: &SpectralField, grid: WaveGrid) -> Result<SpectralField> {
    u.u.check_same_modes(omega)?;
    u.v.check_same_modes(omega)?;
    if grid.n() != omega.n() {
        return Err(Error::invalid(format!(
            "collocation grid for N = {} used with an N = {} field",
            grid.n(),
            omega.n()
        )));
    }
    let omega = SpectralField::from_coefficients(grid, omega.coefficients().to_vec())?;
    Ok(CollocationKernel::new(grid).evaluate(u, &omega))
}

/// One semi-implicit collocation step on the state's grid, forcing at `t_n`.
pub fn step_collocation(state: &SolverState, forcing: &ForcingSpec, dt: f64, nu: f64) -> Result<SolverState> {
    check_step_params(dt, nu)?;
    let grid = state.omega().grid();
    let f = forcing.resolve(grid)?;
    let nl = CollocationKernel::new(grid).evaluate_from_psi(state.psi(), state.omega());
    advance(state, &nl, &f, dt, nu)
}

/// `max_{k,l} |i k û + i l v̂|`.
pub fn check_discrete_divergence_free(u: &VelocityField) -> f64 {
    let g = u.u.grid();
    g.modes()
        .map(|(k, l, i)| {
            let d = I * k as f64 * u.u.coefficients()[i] + I * l as f64 * u.v.get(k, l);
            d.norm()
        })
        .fold(0.0, f64::max)
}

/// `|⟨ω, u·∇_N ω + ∇_N·(uω)⟩_grid| / max(1, ‖ω‖₂²)`, summed directly over
/// the state's collocation grid.
pub fn check_skew_orthogonality(state: &SolverState) -> f64 {
    skew_form_residual(state, 1.0, 1.0)
}

/// As [`check_skew_orthogonality`] for the weighted form
/// `a·u·∇ω + b·∇·(uω)`; only `a = b` is orthogonal to `ω`.
pub fn skew_form_residual(state: &SolverState, adv_weight: f64, div_weight: f64) -> f64 {
    let grid = state.omega().grid();
    let vel = velocity_from_streamfunction(state.psi());
    let terms = CollocationKernel::new(grid).grid_terms(&vel, state.omega());
    let h = grid.spacing();
    let ip: f64 = terms
        .omega
        .iter()
        .zip(terms.adv.iter().zip(&terms.div))
        .map(|(w, (a, d))| w * (adv_weight * a + div_weight * d))
        .sum::<f64>()
        * h
        * h;
    let norm_sq = l2_norm(state.omega()).powi(2);
    ip.abs() / norm_sq.max(1.0)
}
