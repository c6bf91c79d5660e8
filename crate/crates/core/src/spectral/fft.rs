//! Square 2D FFT engine specialised for band-limited fields.
//!
//! Synthesis only transforms the rows that carry retained modes before the
//! transpose, and analysis only finishes the columns it extracts, so a
//! padded grid of size `m` costs roughly `(m + 2n + 1) / (2m)` of a full
//! 2D transform.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub struct Fft2d {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Fft2d {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2d").field("size", &self.size).finish()
    }
}

impl Clone for Fft2d {
    fn clone(&self) -> Self {
        Self {
            size: self.size,
            forward: Arc::clone(&self.forward),
            inverse: Arc::clone(&self.inverse),
            scratch: vec![ZERO; self.scratch.len()],
        }
    }
}

impl Fft2d {
    pub fn new(size: usize) -> Self {
        assert!(size > 0, "FFT size must be positive");
        let (forward, inverse) = PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            (p.plan_fft_forward(size), p.plan_fft_inverse(size))
        });
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            size,
            forward,
            inverse,
            scratch: vec![ZERO; scratch_len],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn buffer(&self) -> Vec<Complex64> {
        vec![ZERO; self.size * self.size]
    }

    /// `buf[i * m + j] = Σ coef(k, l) e^{i(k x_i + l y_j)}` for coefficients
    /// stored over `[-n, n]^2`. Modes outside the grid's Nyquist range are
    /// folded (aliased) onto their grid representative.
    pub fn synthesize(&mut self, coef: &[Complex64], n: usize, buf: &mut [Complex64]) {
        self.place(n, buf, |i| coef[i]);
        self.finish_synthesis(n, buf);
    }

    /// Synthesizes `a + i b`; for Hermitian `a`, `b` the real and imaginary
    /// parts of the result are the two real fields.
    pub fn synthesize_pair(
        &mut self,
        a: &[Complex64],
        b: &[Complex64],
        n: usize,
        buf: &mut [Complex64],
    ) {
        self.place(n, buf, |i| a[i] + Complex64::new(-b[i].im, b[i].re));
        self.finish_synthesis(n, buf);
    }

    /// Extracts `coef(k, l) = m^{-2} Σ buf e^{-i(k x_i + l y_j)}` for
    /// `|k|, |l| <= n`. `buf` is used as workspace. Requires `m >= 2n + 1`.
    pub fn analyze(&mut self, buf: &mut [Complex64], n: usize, out: &mut [Complex64]) {
        self.partial_forward(buf, n);
        let m = self.size;
        let w = 2 * n + 1;
        let norm = 1.0 / (m * m) as f64;
        let ni = n as i64;
        for k in -ni..=ni {
            let kb = wrap(k, m);
            for l in -ni..=ni {
                let lb = wrap(l, m);
                out[((k + ni) as usize) * w + (l + ni) as usize] = buf[lb * m + kb] * norm;
            }
        }
    }

    /// Analyzes a buffer holding `a + i b` with `a`, `b` real, separating the
    /// two spectra.
    pub fn analyze_pair(
        &mut self,
        buf: &mut [Complex64],
        n: usize,
        out_a: &mut [Complex64],
        out_b: &mut [Complex64],
    ) {
        self.partial_forward(buf, n);
        let m = self.size;
        let w = 2 * n + 1;
        let norm = 0.5 / (m * m) as f64;
        let ni = n as i64;
        for k in -ni..=ni {
            for l in -ni..=ni {
                let z = buf[wrap(l, m) * m + wrap(k, m)];
                let zc = buf[wrap(-l, m) * m + wrap(-k, m)].conj();
                let idx = ((k + ni) as usize) * w + (l + ni) as usize;
                out_a[idx] = (z + zc) * norm;
                let d = (z - zc) * norm;
                out_b[idx] = Complex64::new(d.im, -d.re);
            }
        }
    }

    fn place(&mut self, n: usize, buf: &mut [Complex64], value: impl Fn(usize) -> Complex64) {
        let m = self.size;
        assert_eq!(buf.len(), m * m);
        buf.fill(ZERO);
        let w = 2 * n + 1;
        let ni = n as i64;
        for k in -ni..=ni {
            let row = wrap(k, m) * m;
            let base = ((k + ni) as usize) * w;
            for l in -ni..=ni {
                buf[row + wrap(l, m)] += value(base + (l + ni) as usize);
            }
        }
    }

    fn finish_synthesis(&mut self, n: usize, buf: &mut [Complex64]) {
        let m = self.size;
        if m >= 2 * n + 1 {
            // Occupied rows are 0..=n and m-n..m.
            self.inverse
                .process_with_scratch(&mut buf[..(n + 1) * m], &mut self.scratch);
            if n > 0 {
                self.inverse
                    .process_with_scratch(&mut buf[(m - n) * m..], &mut self.scratch);
            }
        } else {
            self.inverse.process_with_scratch(buf, &mut self.scratch);
        }
        transpose(buf, m);
        self.inverse.process_with_scratch(buf, &mut self.scratch);
        transpose(buf, m);
    }

    /// Full transform along `l`, transpose, then the `k` transform only for
    /// the retained `l` bins. Leaves the result transposed (`[l][k]`).
    fn partial_forward(&mut self, buf: &mut [Complex64], n: usize) {
        let m = self.size;
        assert_eq!(buf.len(), m * m);
        assert!(m > 2 * n, "analysis grid of size {m} cannot hold modes up to {n}");
        self.forward.process_with_scratch(buf, &mut self.scratch);
        transpose(buf, m);
        self.forward
            .process_with_scratch(&mut buf[..(n + 1) * m], &mut self.scratch);
        if n > 0 {
            self.forward
                .process_with_scratch(&mut buf[(m - n) * m..], &mut self.scratch);
        }
    }
}

#[inline]
pub(crate) fn wrap(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

fn transpose(buf: &mut [Complex64], m: usize) {
    const BLOCK: usize = 16;
    for ib in (0..m).step_by(BLOCK) {
        for jb in (ib..m).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(m) {
                let start = if ib == jb { i + 1 } else { jb };
                for j in start..(jb + BLOCK).min(m) {
                    buf.swap(i * m + j, j * m + i);
                }
            }
        }
    }
}
