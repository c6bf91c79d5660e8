//! Binary checkpoints.
//!
//! Layout, little-endian: magic `VORT2D\x01`, `u32 N`, `u32 P`, `f64 nu`,
//! `f64 t`, `u64 step`, `u8 scheme tag`, then `(2N+1)²` coefficient pairs
//! `(f64 re, f64 im)` with `k` outer and `l` inner, both from `-N` to `N`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, WaveGrid};
use crate::state::SolverState;
use crate::stepper::Scheme;

pub const MAGIC: &[u8; 7] = b"VORT2D\x01";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub scheme: Scheme,
    pub nu: f64,
    pub state: SolverState,
}

pub fn checkpoint_name(step: u64) -> String {
    format!("ckpt_{step}.bin")
}

pub fn checkpoint_path(dir: &Path, step: u64) -> PathBuf {
    dir.join(checkpoint_name(step))
}

pub fn write_checkpoint(path: &Path, scheme: Scheme, nu: f64, state: &SolverState) -> Result<()> {
    let grid = state.omega().grid();
    let err = |message: String| Error::Checkpoint {
        path: path.to_path_buf(),
        message,
    };
    let n = u32::try_from(grid.n()).map_err(|_| err("N does not fit in u32".into()))?;
    let p = u32::try_from(grid.p()).map_err(|_| err("P does not fit in u32".into()))?;
    let mut w = BufWriter::new(File::create(path).map_err(|e| err(e.to_string()))?);
    let mut bytes = Vec::with_capacity(40 + 16 * grid.num_modes());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&n.to_le_bytes());
    bytes.extend_from_slice(&p.to_le_bytes());
    bytes.extend_from_slice(&nu.to_le_bytes());
    bytes.extend_from_slice(&state.t().to_le_bytes());
    bytes.extend_from_slice(&state.step().to_le_bytes());
    bytes.push(scheme.tag());
    for c in state.omega().coefficients() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    w.write_all(&bytes).and_then(|_| w.flush()).map_err(|e| err(e.to_string()))
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const K: usize>(&mut self) -> Option<[u8; K]> {
        let s = self.data.get(self.pos..self.pos + K)?;
        self.pos += K;
        s.try_into().ok()
    }
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let err = |message: String| Error::Checkpoint {
        path: path.to_path_buf(),
        message,
    };
    let mut data = Vec::new();
    BufReader::new(File::open(path).map_err(|e| err(e.to_string()))?)
        .read_to_end(&mut data)
        .map_err(|e| err(e.to_string()))?;
    let truncated = || err("file is truncated".into());
    let mut c = Cursor { data: &data, pos: 0 };
    if c.take::<7>().as_ref() != Some(MAGIC) {
        return Err(err("bad magic bytes (not a checkpoint or unsupported version)".into()));
    }
    let n = u32::from_le_bytes(c.take().ok_or_else(truncated)?) as usize;
    let p = u32::from_le_bytes(c.take().ok_or_else(truncated)?) as usize;
    let nu = f64::from_le_bytes(c.take().ok_or_else(truncated)?);
    let t = f64::from_le_bytes(c.take().ok_or_else(truncated)?);
    let step = u64::from_le_bytes(c.take().ok_or_else(truncated)?);
    let [tag] = c.take::<1>().ok_or_else(truncated)?;
    let scheme = Scheme::from_tag(tag).ok_or_else(|| err(format!("unknown scheme tag {tag}")))?;
    if n == 0 || n > super::config::MAX_N {
        return Err(err(format!("implausible N = {n}")));
    }
    let grid = WaveGrid::new(n, p).map_err(|e| err(e.to_string()))?;
    let expected = c.pos + 16 * grid.num_modes();
    if data.len() != expected {
        return Err(err(format!("expected {expected} bytes, found {}", data.len())));
    }
    let mut coef = Vec::with_capacity(grid.num_modes());
    for _ in 0..grid.num_modes() {
        let re = f64::from_le_bytes(c.take().ok_or_else(truncated)?);
        let im = f64::from_le_bytes(c.take().ok_or_else(truncated)?);
        coef.push(Complex64::new(re, im));
    }
    let omega = SpectralField::from_coefficients(grid, coef)?;
    if !omega.is_finite() || !nu.is_finite() || !t.is_finite() {
        return Err(err("non-finite values".into()));
    }
    let state = SolverState::new(omega, t, step).map_err(|e| err(e.to_string()))?;
    Ok(Checkpoint { scheme, nu, state })
}
