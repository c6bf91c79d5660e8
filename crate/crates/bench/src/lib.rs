//! Fixtures shared by the benchmarks.

use vort2d_core::spectral::random::{random_field, sample_rng};
use vort2d_core::{Scheme, SolverState, WaveGrid};

/// Random unit-L² state on the default grid of `scheme` at resolution `n`.
pub fn random_state(scheme: Scheme, n: usize, seed: u64) -> SolverState {
    let grid = WaveGrid::new(n, scheme.default_points(n)).expect("valid resolution");
    let omega = random_field(grid, 1, n, 1.0, &mut sample_rng(seed, 0));
    SolverState::initial(omega).expect("mean-zero field")
}
