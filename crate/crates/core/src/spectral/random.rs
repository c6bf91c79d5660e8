//! Seeded random fields. Every draw is addressed by `(seed, index)` so a
//! sample does not depend on how many were drawn before it or on thread
//! scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{SpectralField, WaveGrid};

/// Independent generator for sample `index` of stream `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mean-zero real field with unit-normal coefficients weighted by
/// `(k² + l²)^{-decay/2}` on modes with `kmin <= max(|k|, |l|) <= kmax`,
/// scaled to unit L² norm (zero field if the band is empty).
pub fn random_field<R: Rng>(
    grid: WaveGrid,
    kmin: usize,
    kmax: usize,
    decay: f64,
    rng: &mut R,
) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let kmax = kmax.min(grid.n()) as i64;
    let kmin = kmin.max(1) as i64;
    let mut sum_sq = 0.0;
    for k in -kmax..=kmax {
        for l in -kmax..=kmax {
            // One representative per conjugate pair.
            if k < 0 || (k == 0 && l <= 0) {
                continue;
            }
            let band = k.abs().max(l.abs());
            if band < kmin {
                continue;
            }
            let w = ((k * k + l * l) as f64).powf(-0.5 * decay);
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let c = Complex64::new(re, im) * w;
            sum_sq += 2.0 * c.norm_sqr();
            f.set_pair(k, l, c);
        }
    }
    if sum_sq > 0.0 {
        // L² norm on (0, 2π)^2 is 2π sqrt(Σ|c|²).
        f.scaled(1.0 / (2.0 * std::f64::consts::PI * sum_sq.sqrt()))
    } else {
        f
    }
}
