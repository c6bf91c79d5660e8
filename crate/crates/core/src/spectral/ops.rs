use num_complex::Complex64;

use super::fft::Fft2d;
use super::field::{PhysField, SpectralField, VelocityField};
use super::grid::{dealias_size, WaveGrid};
use crate::error::{Error, Result};

/// Mean coefficient magnitude above which a field is not treated as
/// belonging to the mean-zero class.
pub const MEAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Coefficients of the trigonometric polynomial through the grid values,
/// truncated to the grid's mode set. The mean coefficient is the grid mean.
pub fn forward_transform(p: &PhysField) -> SpectralField {
    let grid = p.grid();
    let mut fft = Fft2d::new(grid.p());
    let mut buf: Vec<Complex64> = p.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut coef = vec![Complex64::new(0.0, 0.0); grid.num_modes()];
    fft.analyze(&mut buf, grid.n(), &mut coef);
    SpectralField::from_coefficients(grid, coef).expect("sized by grid")
}

/// Evaluates the field at `points x points` grid points.
pub fn inverse_transform(s: &SpectralField, points: usize) -> Result<PhysField> {
    let grid = s.grid().with_points(points)?;
    Ok(sample_on(s, grid))
}

/// Evaluates `s` (of any degree) on `target`'s physical grid. When `s` has
/// modes beyond the grid's Nyquist range they alias onto their grid
/// representatives, which is exactly what pointwise sampling does.
pub fn sample_on(s: &SpectralField, target: WaveGrid) -> PhysField {
    let mut fft = Fft2d::new(target.p());
    let mut buf = fft.buffer();
    fft.synthesize(s.coefficients(), s.n(), &mut buf);
    PhysField::from_vec_unchecked(target, buf.into_iter().map(|z| z.re).collect())
}

pub fn derivative(s: &SpectralField, axis: Axis, order: u32) -> SpectralField {
    s.map_modes(|k, l, c| {
        let w = match axis {
            Axis::X => k,
            Axis::Y => l,
        } as f64;
        c * Complex64::new(0.0, w).powu(order)
    })
}

pub fn laplacian(s: &SpectralField) -> SpectralField {
    s.map_modes(|k, l, c| c * -((k * k + l * l) as f64))
}

/// Solves `-Δψ = ω` in the mean-zero class.
pub fn solve_poisson(omega: &SpectralField) -> Result<SpectralField> {
    if omega.mean().norm() > MEAN_TOLERANCE {
        return Err(Error::invalid(format!(
            "Poisson right-hand side has nonzero mean {:.3e}",
            omega.mean().norm()
        )));
    }
    Ok(inverse_laplacian(omega))
}

/// `ω(k,l) / (k² + l²)` with the mean mode set to zero; no mean check.
pub(crate) fn inverse_laplacian(omega: &SpectralField) -> SpectralField {
    omega.map_modes(|k, l, c| {
        let k2 = (k * k + l * l) as f64;
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c / k2
        }
    })
}

/// `u = ∇⊥ψ = (-∂_y ψ, ∂_x ψ)`.
pub fn velocity_from_streamfunction(psi: &SpectralField) -> VelocityField {
    let psi = psi.clone().without_mean();
    VelocityField {
        u: derivative(&psi, Axis::Y, 1).scaled(-1.0),
        v: derivative(&psi, Axis::X, 1),
    }
}

/// Orthogonal projection onto modes with `max(|k|, |l|) <= n_target`.
pub fn project_pn(s: &SpectralField, n_target: usize) -> Result<SpectralField> {
    if n_target > s.n() || n_target == 0 {
        return Err(Error::invalid(format!(
            "cannot project N = {} field onto N = {n_target}",
            s.n()
        )));
    }
    let grid = WaveGrid::new(n_target, s.grid().p())?;
    let mut out = SpectralField::zeros(grid);
    let coef = out.coefficients_mut();
    for (k, l, i) in grid.modes() {
        coef[i] = s.get(k, l);
    }
    Ok(out)
}

/// Zero-extends `s` to the mode set of `grid` (`grid.n() >= s.n()`).
pub fn embed(s: &SpectralField, grid: WaveGrid) -> Result<SpectralField> {
    if grid.n() < s.n() {
        return Err(Error::invalid(format!(
            "cannot embed N = {} field into N = {}",
            s.n(),
            grid.n()
        )));
    }
    let mut out = SpectralField::zeros(grid);
    let coef = out.coefficients_mut();
    for (k, l, i) in s.grid().modes() {
        coef[grid.index(k, l)] = s.coefficients()[i];
    }
    Ok(out)
}

/// Unique trigonometric polynomial of degree `<= N` through the values on
/// the critical `(2N + 1)`-point grid.
pub fn interpolate_in(p: &PhysField) -> Result<SpectralField> {
    let g = p.grid();
    if g.p() != 2 * g.n() + 1 {
        return Err(Error::invalid(format!(
            "interpolation needs the critical grid of {} points, got {}",
            2 * g.n() + 1,
            g.p()
        )));
    }
    Ok(forward_transform(p))
}

/// Padding size for alias-free quadratic products of `grid`'s modes.
pub(crate) fn product_size(grid: WaveGrid) -> usize {
    let need = 3 * grid.n() + 2;
    if grid.p() >= need {
        grid.p()
    } else {
        dealias_size(grid.n())
    }
}

/// `P_N(a b)` without aliasing error in any retained mode. The mean is
/// kept; call [`SpectralField::without_mean`] where the mean-zero product
/// is wanted.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_same_grid(b)?;
    let grid = a.grid();
    let mut fft = Fft2d::new(product_size(grid));
    let mut buf = fft.buffer();
    fft.synthesize_pair(a.coefficients(), b.coefficients(), grid.n(), &mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.re * z.im, 0.0);
    }
    let mut out = SpectralField::zeros(grid);
    fft.analyze(&mut buf, grid.n(), out.coefficients_mut());
    Ok(out)
}

/// The full product `a b` as a degree-`2N` field (no projection). The
/// returned field lives on modes `[-2N, 2N]^2` with a grid of `4N + 1`
/// points.
pub fn exact_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_same_modes(b)?;
    let n = a.n();
    let grid = WaveGrid::critical(2 * n)?;
    let mut fft = Fft2d::new(super::grid::fft_friendly_size(4 * n + 1));
    let mut buf = fft.buffer();
    fft.synthesize_pair(a.coefficients(), b.coefficients(), n, &mut buf);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.re * z.im, 0.0);
    }
    let mut out = SpectralField::zeros(grid);
    fft.analyze(&mut buf, 2 * n, out.coefficients_mut());
    Ok(out)
}
