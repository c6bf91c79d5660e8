use num_complex::Complex64;

use super::grid::WaveGrid;
use crate::error::{Error, Result};

/// Fourier coefficients of a real periodic scalar field, modes `(k, l)` in
/// `[-n, n]^2`, normalized so that `f(x, y) = Σ coef(k, l) e^{i(kx + ly)}`.
///
/// Real fields carry Hermitian-symmetric coefficients. The mean coefficient
/// is stored as-is; operations that need the mean-zero class check it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: WaveGrid,
    coef: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: WaveGrid) -> Self {
        Self {
            grid,
            coef: vec![Complex64::new(0.0, 0.0); grid.num_modes()],
        }
    }

    pub fn from_coefficients(grid: WaveGrid, coef: Vec<Complex64>) -> Result<Self> {
        if coef.len() != grid.num_modes() {
            return Err(Error::invalid(format!(
                "expected {} coefficients for N = {}, got {}",
                grid.num_modes(),
                grid.n(),
                coef.len()
            )));
        }
        Ok(Self { grid, coef })
    }

    /// Builds a real field from a list of `(k, l, amplitude)` entries. Each
    /// entry also sets its conjugate partner `(-k, -l)`; an entry whose
    /// partner is listed with a non-conjugate amplitude is rejected.
    pub fn from_modes(grid: WaveGrid, modes: &[(i64, i64, Complex64)]) -> Result<Self> {
        let n = grid.n() as i64;
        let mut field = Self::zeros(grid);
        let mut set = vec![false; grid.num_modes()];
        for &(k, l, c) in modes {
            if k.abs() > n || l.abs() > n {
                return Err(Error::invalid(format!(
                    "mode ({k}, {l}) lies outside the retained set [-{n}, {n}]^2"
                )));
            }
            let (i, j) = (grid.index(k, l), grid.index(-k, -l));
            if i == j && c.im.abs() > 0.0 {
                return Err(Error::invalid("mean coefficient must be real"));
            }
            for (idx, val) in [(i, c), (j, c.conj())] {
                if set[idx] && (field.coef[idx] - val).norm() > 1e-14 * (1.0 + val.norm()) {
                    return Err(Error::invalid(format!(
                        "mode ({k}, {l}) conflicts with the amplitude given for its conjugate partner"
                    )));
                }
                field.coef[idx] = val;
                set[idx] = true;
            }
        }
        Ok(field)
    }

    pub fn grid(&self) -> WaveGrid {
        self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coef
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coef
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coef
    }

    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        let n = self.n() as i64;
        if k.abs() > n || l.abs() > n {
            return Complex64::new(0.0, 0.0);
        }
        self.coef[self.grid.index(k, l)]
    }

    /// Sets `(k, l)` and its conjugate partner.
    pub fn set_pair(&mut self, k: i64, l: i64, c: Complex64) {
        let i = self.grid.index(k, l);
        let j = self.grid.index(-k, -l);
        self.coef[i] = c;
        self.coef[j] = c.conj();
    }

    pub fn mean(&self) -> Complex64 {
        self.get(0, 0)
    }

    pub fn zero_mean(&mut self) {
        let i = self.grid.index(0, 0);
        self.coef[i] = Complex64::new(0.0, 0.0);
    }

    pub fn without_mean(mut self) -> Self {
        self.zero_mean();
        self
    }

    /// Same coefficients tagged with a different physical grid size.
    pub fn on_points(mut self, p: usize) -> Result<Self> {
        self.grid = self.grid.with_points(p)?;
        Ok(self)
    }

    /// Largest `|coef(k, l) - conj(coef(-k, -l))|`; zero for real fields.
    pub fn hermitian_defect(&self) -> f64 {
        self.grid
            .modes()
            .map(|(k, l, i)| (self.coef[i] - self.coef[self.grid.index(-k, -l)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coef.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coef.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Applies a per-mode multiplier `m(k, l)`.
    pub fn map_modes(&self, mut m: impl FnMut(i64, i64, Complex64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (k, l, i) in self.grid.modes() {
            out.coef[i] = m(k, l, self.coef[i]);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coef.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &SpectralField) -> Result<()> {
        self.check_same_modes(other)?;
        for (a, b) in self.coef.iter_mut().zip(&other.coef) {
            *a += b * s;
        }
        Ok(())
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(1.0, other)?;
        Ok(out)
    }

    pub(crate) fn check_same_modes(&self, other: &SpectralField) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::invalid(format!(
                "mode set mismatch: N = {} vs N = {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::invalid(format!(
                "grid mismatch: (N = {}, P = {}) vs (N = {}, P = {})",
                self.n(),
                self.grid.p(),
                other.n(),
                other.grid.p()
            )));
        }
        Ok(())
    }
}

/// Real point values on the `p x p` collocation grid, `vals[i * p + j]` at
/// `(x_i, y_j) = (i h, j h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysField {
    grid: WaveGrid,
    vals: Vec<f64>,
}

impl PhysField {
    pub fn new(grid: WaveGrid, vals: Vec<f64>) -> Result<Self> {
        if vals.len() != grid.p() * grid.p() {
            return Err(Error::invalid(format!(
                "expected {} point values for P = {}, got {}",
                grid.p() * grid.p(),
                grid.p(),
                vals.len()
            )));
        }
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point values must be finite"));
        }
        Ok(Self { grid, vals })
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: WaveGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let p = grid.p();
        let mut vals = Vec::with_capacity(p * p);
        for i in 0..p {
            let x = grid.coord(i);
            for j in 0..p {
                vals.push(f(x, grid.coord(j)));
            }
        }
        Self { grid, vals }
    }

    pub(crate) fn from_vec_unchecked(grid: WaveGrid, vals: Vec<f64>) -> Self {
        debug_assert_eq!(vals.len(), grid.p() * grid.p());
        Self { grid, vals }
    }

    pub fn grid(&self) -> WaveGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.vals[i * self.grid.p() + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Velocity components in coefficient space.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityField {
    pub u: SpectralField,
    pub v: SpectralField,
}
