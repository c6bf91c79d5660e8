//! Stability of grid interpolation on products of resolved fields.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{sobolev_norm, SobolevOrder};
use crate::error::{Error, Result};
use crate::parallel::ordered_map;
use crate::spectral::random::{random_field, sample_rng};
use crate::spectral::{exact_product, interpolate_in, sample_on, SpectralField, WaveGrid};

/// `‖I_N φ‖_{H^k} <= 2 ‖φ‖_{H^k}` for `φ ∈ P^{2N}` in two dimensions.
pub const INTERPOLATION_BOUND: f64 = 2.0;

const BOUND_TOLERANCE: f64 = 1e-10;

/// `‖I_N φ‖_{H^k} / ‖φ‖_{H^k}` with `I_N` the interpolant on the
/// `(2N+1)²` grid. `φ` must lie in `P^{2N}`.
pub fn interpolation_ratio(phi: &SpectralField, n: usize, k_order: u32) -> Result<f64> {
    if phi.n() > 2 * n {
        return Err(Error::invalid(format!(
            "field of degree {} is not in P^{}",
            phi.n(),
            2 * n
        )));
    }
    let order = order_of(k_order)?;
    let grid = WaveGrid::critical(n)?;
    let interp = interpolate_in(&sample_on(phi, grid))?;
    let den = sobolev_norm(phi, order);
    Ok(if den > 0.0 {
        sobolev_norm(&interp, order) / den
    } else {
        0.0
    })
}

fn order_of(k_order: u32) -> Result<SobolevOrder> {
    match k_order {
        0 => Ok(SobolevOrder::L2),
        1 => Ok(SobolevOrder::H1),
        _ => Err(Error::invalid(format!("interpolation order must be 0 or 1, got {k_order}"))),
    }
}

/// Random mean-zero element of `P^{2N}`: the product of two random `P^N`
/// fields plus an independent random `P^{2N}` field, mixed with random weights.
fn draw(n: usize, seed: u64, index: u64) -> Result<SpectralField> {
    let mut rng = sample_rng(seed, index);
    let g = WaveGrid::critical(n)?;
    let g2 = WaveGrid::critical(2 * n)?;
    let a = random_field(g, 1, n, 1.0, &mut rng);
    let b = random_field(g, 1, n, 1.0, &mut rng);
    let prod = exact_product(&a, &b)?.without_mean();
    let decay = if rng.random::<bool>() { 0.0 } else { 1.0 };
    let extra = random_field(g2, 1, 2 * n, decay, &mut rng);
    let wa: f64 = rng.sample(StandardNormal);
    let wb: f64 = rng.sample(StandardNormal);
    let mut out = prod.scaled(wa);
    out.add_scaled(wb, &extra)?;
    Ok(out)
}

/// Max interpolation ratio over `n_samples` random fields. Fails with
/// [`Error::BoundViolated`] if any sample exceeds the bound.
pub fn check_interpolation_bound(n: usize, n_samples: usize, k_order: u32, seed: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(format!("interpolation check needs N >= 2, got {n}")));
    }
    order_of(k_order)?;
    let ratios = ordered_map(n_samples, |i| {
        draw(n, seed, i as u64).and_then(|phi| interpolation_ratio(&phi, n, k_order))
    });
    let mut max = 0.0f64;
    for r in ratios {
        max = max.max(r?);
    }
    if max > INTERPOLATION_BOUND + BOUND_TOLERANCE {
        return Err(Error::BoundViolated {
            what: format!("interpolation ratio (N = {n}, k = {k_order})"),
            value: max,
            bound: INTERPOLATION_BOUND,
        });
    }
    Ok(max)
}
