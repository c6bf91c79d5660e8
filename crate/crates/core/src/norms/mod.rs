//! Discrete inner products, homogeneous Sobolev norms, the advection
//! trilinear form, and numerical estimates of inequality constants.

mod interpolation;
mod wente;

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{
    product_size, sample_on, velocity_from_streamfunction, Axis, Fft2d, PhysField,
    SpectralField, WaveGrid,
};

pub use interpolation::{check_interpolation_bound, interpolation_ratio, INTERPOLATION_BOUND};
pub use wente::{
    estimate_wente_constant, estimate_wente_constants, jacobian, wente_ratios, WenteEnsemble,
    WenteEstimate, WenteVariant,
};

/// Real Sobolev exponent, `|s| <= 4`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevOrder(f64);

impl SobolevOrder {
    pub const H_MINUS_1: SobolevOrder = SobolevOrder(-1.0);
    pub const L2: SobolevOrder = SobolevOrder(0.0);
    pub const H_HALF: SobolevOrder = SobolevOrder(0.5);
    pub const H1: SobolevOrder = SobolevOrder(1.0);
    pub const H2: SobolevOrder = SobolevOrder(2.0);

    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s.abs() > 4.0 {
            return Err(Error::invalid(format!("Sobolev order {s} outside [-4, 4]")));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `h² Σ f_ij g_ij` over the collocation grid.
pub fn grid_inner_product(f: &PhysField, g: &PhysField) -> Result<f64> {
    if f.grid().p() != g.grid().p() {
        return Err(Error::invalid(format!(
            "inner product of fields on {} and {} point grids",
            f.grid().p(),
            g.grid().p()
        )));
    }
    let h = f.grid().spacing();
    let sum: f64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    Ok(h * h * sum)
}

/// `(2π)² Re Σ a(k,l) conj(b(k,l))`, the continuum L² inner product of two
/// band-limited fields.
pub fn spectral_inner_product(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    a.check_same_modes(b)?;
    let s: f64 = a
        .coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(x, y)| (x * y.conj()).re)
        .sum();
    Ok(4.0 * PI * PI * s)
}

/// Homogeneous norm `2π (Σ_{(k,l)≠0} (k²+l²)^s |coef|²)^{1/2}`; the mean
/// mode never contributes.
pub fn sobolev_norm(s: &SpectralField, order: SobolevOrder) -> f64 {
    sobolev_norm_sq(s, order).sqrt()
}

pub fn sobolev_norm_sq(s: &SpectralField, order: SobolevOrder) -> f64 {
    let p = order.0;
    let mut sum = 0.0;
    for (k, l, i) in s.grid().modes() {
        let k2 = (k * k + l * l) as f64;
        if k2 == 0.0 {
            continue;
        }
        let w = if p == 0.0 {
            1.0
        } else if p == 1.0 {
            k2
        } else if p == 2.0 {
            k2 * k2
        } else if p == -1.0 {
            1.0 / k2
        } else {
            k2.powf(p)
        };
        sum += w * s.coefficients()[i].norm_sqr();
    }
    4.0 * PI * PI * sum
}

pub fn l2_norm(s: &SpectralField) -> f64 {
    sobolev_norm(s, SobolevOrder::L2)
}

pub fn h1_norm(s: &SpectralField) -> f64 {
    sobolev_norm(s, SobolevOrder::H1)
}

pub fn h2_norm(s: &SpectralField) -> f64 {
    sobolev_norm(s, SobolevOrder::H2)
}

/// Poincaré constant `c0` with `‖ω‖₂ <= c0 ‖ω‖_{H¹}` for mean-zero fields on
/// `(0, 2π)^2`: the lowest nonzero eigenvalue of `-Δ` is 1.
pub fn poincare_constant(_grid: WaveGrid) -> f64 {
    1.0
}

/// `b(ψ, ω, φ) = (∇⊥ψ · ∇ω, φ)`, evaluated by grid quadrature on a grid
/// fine enough that the degree-`3N` integrand is integrated exactly.
pub fn trilinear_b(psi: &SpectralField, omega: &SpectralField, phi: &SpectralField) -> Result<f64> {
    psi.check_same_modes(omega)?;
    psi.check_same_modes(phi)?;
    let n = psi.n();
    let grid = WaveGrid::new(n, product_size(psi.grid()).max(3 * n + 1))?;
    let m = grid.p();
    let vel = velocity_from_streamfunction(psi);
    let wx = crate::spectral::derivative(omega, Axis::X, 1);
    let wy = crate::spectral::derivative(omega, Axis::Y, 1);

    let mut fft = Fft2d::new(m);
    let mut uv = fft.buffer();
    let mut grad = fft.buffer();
    fft.synthesize_pair(vel.u.coefficients(), vel.v.coefficients(), n, &mut uv);
    fft.synthesize_pair(wx.coefficients(), wy.coefficients(), n, &mut grad);
    let adv: Vec<f64> = uv
        .iter()
        .zip(&grad)
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .collect();
    let adv = PhysField::from_vec_unchecked(grid, adv);
    let phi_vals = sample_on(phi, grid);
    grid_inner_product(&adv, &phi_vals)
}
