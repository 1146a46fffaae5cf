//! Shared fixtures for the benchmarks.

use qes_core::{solve_state, GridSpec, Wavefunction};

/// Couplings spanning the single-well, critical and double-well regimes.
pub const COUPLINGS: [f64; 3] = [-0.75, 1.0, 4.0];

/// Degree index used throughout (polynomial degree 12).
pub const DEGREE_INDEX: usize = 6;

/// Normalized variational state `n` at `lambda`.
pub fn state(n: usize, lambda: f64) -> Wavefunction {
    solve_state(n, lambda, DEGREE_INDEX)
        .expect("benchmark states are well conditioned")
        .wavefunction()
}

/// A coarse grid for per-iteration timings.
pub fn small_grid() -> GridSpec {
    GridSpec::symmetric(81, 6.0, 81, 12.0).expect("valid grid")
}

/// The production grid.
pub fn default_grid() -> GridSpec {
    GridSpec::default()
}
