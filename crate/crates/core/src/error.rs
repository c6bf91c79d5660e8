use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("resolution error: {points} points per direction cannot resolve modes up to {n} (need at least {})", 2 * n + 1)]
    Resolution { n: usize, points: usize },

    #[error("numerical failure at step {step}: non-finite vorticity{}", match .last_checkpoint {
        Some(p) => format!(" (last good checkpoint: {})", p.display()),
        None => String::new(),
    })]
    NumericalFailure {
        step: u64,
        last_checkpoint: Option<PathBuf>,
    },

    #[error("config error{}: key `{key}`: {message}", match .line {
        Some(l) => format!(" at line {l}"),
        None => String::new(),
    })]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },

    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error("time step {dt} exceeds the stability budget k0 = {k0} (m0 = {m0}, cw = {cw}); refusing to start with enforce_k0 = true")]
    BudgetExceeded { dt: f64, k0: f64, m0: f64, cw: f64 },

    #[error("{what}: {value} exceeds the bound {bound}")]
    BoundViolated {
        what: String,
        value: f64,
        bound: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
