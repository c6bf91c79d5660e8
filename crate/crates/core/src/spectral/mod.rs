//! Grids, transforms, spectral differentiation, Poisson inversion and
//! dealiased products on the `(0, 2π)^2` torus.

mod fft;
mod field;
mod grid;
mod ops;
pub mod random;

pub use fft::Fft2d;
pub use field::{PhysField, SpectralField, VelocityField};
pub use grid::{dealias_size, fft_friendly_size, WaveGrid, PERIOD};
pub use ops::{
    dealiased_product, derivative, embed, exact_product, forward_transform, interpolate_in,
    inverse_transform, laplacian, project_pn, sample_on, solve_poisson,
    velocity_from_streamfunction, Axis, MEAN_TOLERANCE,
};
pub(crate) use ops::{inverse_laplacian, product_size};
