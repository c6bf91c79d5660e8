use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Domain period in each direction. Wavenumbers are integers.
pub const PERIOD: f64 = 2.0 * PI;

/// Retained mode set `[-n, n]^2` together with a square physical grid of
/// `p x p` points on the `(0, 2π)^2` torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WaveGrid {
    n: usize,
    p: usize,
}

impl WaveGrid {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("mode cutoff N must be at least 1"));
        }
        if p < 3 || p < 2 * n + 1 {
            return Err(Error::Resolution { n, points: p });
        }
        Ok(Self { n, p })
    }

    /// Odd grid with `2n + 1` points, the smallest that resolves every mode.
    pub fn critical(n: usize) -> Result<Self> {
        Self::new(n, 2 * n + 1)
    }

    /// Grid whose physical size is large enough to form quadratic products
    /// without aliasing into retained modes (power of two `>= 3n + 2`).
    pub fn dealiased(n: usize) -> Result<Self> {
        Self::new(n, dealias_size(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Side length of the coefficient array, `2n + 1`.
    pub fn width(&self) -> usize {
        2 * self.n + 1
    }

    pub fn num_modes(&self) -> usize {
        self.width() * self.width()
    }

    pub fn spacing(&self) -> f64 {
        PERIOD / self.p as f64
    }

    pub fn with_points(&self, p: usize) -> Result<Self> {
        Self::new(self.n, p)
    }

    /// Row-major index of mode `(k, l)`, `k` outer.
    #[inline]
    pub fn index(&self, k: i64, l: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(k.abs() <= n && l.abs() <= n);
        ((k + n) as usize) * self.width() + (l + n) as usize
    }

    /// Iterates `(k, l, index)` over all retained modes in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, i64, usize)> {
        let n = self.n as i64;
        let w = self.width();
        (-n..=n).flat_map(move |k| {
            (-n..=n).map(move |l| (k, l, ((k + n) as usize) * w + (l + n) as usize))
        })
    }

    /// Grid coordinate of point `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

/// Power-of-two padding size used by dealiased products.
pub fn dealias_size(n: usize) -> usize {
    (3 * n + 2).next_power_of_two()
}

/// Smallest integer `>= min` whose only prime factors are 2, 3 and 5.
pub fn fft_friendly_size(min: usize) -> usize {
    let mut m = min.max(1);
    loop {
        let mut r = m;
        for f in [2, 3, 5] {
            while r % f == 0 {
                r /= f;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_underresolved_grids() {
        assert!(WaveGrid::new(4, 9).is_ok());
        assert!(matches!(
            WaveGrid::new(4, 8),
            Err(Error::Resolution { n: 4, points: 8 })
        ));
        assert!(WaveGrid::new(0, 5).is_err());
        assert!(WaveGrid::new(1, 3).is_ok());
    }

    #[test]
    fn index_matches_mode_iteration() {
        let g = WaveGrid::critical(3).unwrap();
        for (k, l, idx) in g.modes() {
            assert_eq!(g.index(k, l), idx);
        }
        assert_eq!(g.modes().count(), 49);
        assert_eq!(g.index(-3, -3), 0);
        assert_eq!(g.index(3, 3), 48);
    }

    #[test]
    fn padding_sizes() {
        assert_eq!(dealias_size(32), 128);
        assert_eq!(dealias_size(8), 32);
        assert_eq!(dealias_size(2), 8);
        assert_eq!(fft_friendly_size(129), 135);
        assert_eq!(fft_friendly_size(7), 8);
        assert_eq!(fft_friendly_size(60), 60);
    }
}
