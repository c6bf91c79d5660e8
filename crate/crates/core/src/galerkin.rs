//! Fourier Galerkin advection: `P_N(∇⊥ψ · ∇ω)` evaluated without aliasing
//! on a padded grid.

use num_complex::Complex64;

use crate::error::Result;
use crate::forcing::ForcingSpec;
use crate::spectral::{product_size, Fft2d, SpectralField, WaveGrid};
use crate::state::SolverState;
use crate::stepper::{advance, check_step_params};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub(crate) struct GalerkinKernel {
    grid: WaveGrid,
    fft: Fft2d,
    vel: Vec<Complex64>,
    grad: Vec<Complex64>,
    scratch: [Vec<Complex64>; 4],
}

impl GalerkinKernel {
    pub(crate) fn new(grid: WaveGrid) -> Self {
        let fft = Fft2d::new(product_size(grid));
        let len = grid.num_modes();
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self {
            grid,
            vel: fft.buffer(),
            grad: fft.buffer(),
            fft,
            scratch: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    pub(crate) fn evaluate(&mut self, psi: &SpectralField, omega: &SpectralField) -> SpectralField {
        let n = self.grid.n();
        let [u, v, wx, wy] = &mut self.scratch;
        let (p, w) = (psi.coefficients(), omega.coefficients());
        for (k, l, i) in self.grid.modes() {
            let (kf, lf) = (k as f64, l as f64);
            u[i] = -I * lf * p[i];
            v[i] = I * kf * p[i];
            wx[i] = I * kf * w[i];
            wy[i] = I * lf * w[i];
        }
        self.fft.synthesize_pair(u, v, n, &mut self.vel);
        self.fft.synthesize_pair(wx, wy, n, &mut self.grad);
        for (a, b) in self.vel.iter_mut().zip(&self.grad) {
            *a = Complex64::new(a.re * b.re + a.im * b.im, 0.0);
        }
        let mut out = SpectralField::zeros(self.grid);
        self.fft.analyze(&mut self.vel, n, out.coefficients_mut());
        out.zero_mean();
        out
    }
}

/// `P_N(∇⊥ψ · ∇ω)` for the state's streamfunction and vorticity, exact in
/// every retained mode.
pub fn galerkin_nonlinear(state: &SolverState) -> SpectralField {
    GalerkinKernel::new(state.omega().grid()).evaluate(state.psi(), state.omega())
}

/// One semi-implicit Galerkin step with forcing evaluated at `t_n`.
pub fn step_galerkin(state: &SolverState, forcing: &ForcingSpec, dt: f64, nu: f64) -> Result<SolverState> {
    check_step_params(dt, nu)?;
    let f = forcing.resolve(state.omega().grid())?;
    let nl = galerkin_nonlinear(state);
    advance(state, &nl, &f, dt, nu)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;

    use super::*;
    use crate::norms::{l2_norm, spectral_inner_product};
    use crate::spectral::random::{random_field, sample_rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Direct convolution over all retained mode pairs.
    pub(crate) fn convolution_oracle(psi: &SpectralField, omega: &SpectralField) -> SpectralField {
        let g = psi.grid();
        let n = g.n() as i64;
        let mut out = SpectralField::zeros(g);
        for (k, l, i) in g.modes() {
            let mut acc = c(0.0, 0.0);
            for (p, q, _) in g.modes() {
                let (r, s) = (k - p, l - q);
                if r.abs() > n || s.abs() > n {
                    continue;
                }
                let ps = psi.get(p, q);
                let ws = omega.get(r, s);
                let u = -I * q as f64 * ps;
                let v = I * p as f64 * ps;
                acc += u * (I * r as f64 * ws) + v * (I * s as f64 * ws);
            }
            out.coefficients_mut()[i] = acc;
        }
        out.zero_mean();
        out
    }

    #[test]
    fn aligned_fields_give_zero() {
        let g = WaveGrid::dealiased(4).unwrap();
        let sx = SpectralField::from_modes(g, &[(1, 0, c(0.0, -0.5))]).unwrap();
        let tg = SpectralField::from_modes(g, &[(1, 1, c(-0.5, 0.0)), (1, -1, c(0.5, 0.0))]).unwrap();
        for w in [sx, tg] {
            let s = SolverState::initial(w).unwrap();
            assert!(galerkin_nonlinear(&s).max_abs() < 1e-16);
        }
    }

    #[test]
    fn matches_convolution_oracle() {
        for n in [2usize, 3, 4] {
            let g = WaveGrid::dealiased(n).unwrap();
            for i in 0..20 {
                let w = random_field(g, 1, n, 0.0, &mut sample_rng(n as u64, i));
                let s = SolverState::initial(w).unwrap();
                let got = galerkin_nonlinear(&s);
                let want = convolution_oracle(s.psi(), s.omega());
                let err = got.sub(&want).unwrap().max_abs();
                assert!(err <= 1e-13 * want.max_abs(), "n={n} err={err}");
            }
        }
    }

    #[test]
    fn exact_decay_examples() {
        let g = WaveGrid::dealiased(8).unwrap();
        let sx = SpectralField::from_modes(g, &[(1, 0, c(0.0, -0.5))]).unwrap();
        let s1 = step_galerkin(&SolverState::initial(sx.clone()).unwrap(), &ForcingSpec::none(), 0.1, 1.0).unwrap();
        assert!(s1.omega().sub(&sx.scaled(1.0 / 1.1)).unwrap().max_abs() < 1e-17);
        assert_eq!(s1.step(), 1);
        assert!((s1.t() - 0.1).abs() < 1e-17);
        assert!((l2_norm(s1.omega()) - 2f64.sqrt() * PI / 1.1).abs() < 1e-14);

        let tg = SpectralField::from_modes(g, &[(1, 1, c(-0.5, 0.0)), (1, -1, c(0.5, 0.0))]).unwrap();
        let s1 = step_galerkin(&SolverState::initial(tg.clone()).unwrap(), &ForcingSpec::none(), 0.2, 0.5).unwrap();
        assert!(s1.omega().sub(&tg.scaled(1.0 / 1.2)).unwrap().max_abs() < 1e-16);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn nonlinear_is_orthogonal_to_vorticity(seed in any::<u64>(), n in 2usize..10) {
            let g = WaveGrid::dealiased(n).unwrap();
            let w = random_field(g, 1, n, 1.0, &mut sample_rng(seed, 0));
            let s = SolverState::initial(w).unwrap();
            let nl = galerkin_nonlinear(&s);
            let ip = spectral_inner_product(&nl, s.omega()).unwrap();
            prop_assert!(ip.abs() <= 1e-13 * l2_norm(&nl).max(1.0));
            prop_assert!(nl.hermitian_defect() <= 1e-15 * nl.max_abs().max(1.0));
            prop_assert_eq!(nl.mean(), c(0.0, 0.0));
        }
    }
}
