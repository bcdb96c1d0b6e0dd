//! Shared fixtures for the benchmarks.

use num_complex::Complex64;
use rabi2p_core::ModelParams;

/// Parameters used throughout the benchmarks.
pub fn reference_params() -> ModelParams {
    ModelParams::new(2.5, 0.7).expect("valid parameters")
}

/// Evaluation point of the forward recursion.
pub fn z0() -> Complex64 {
    Complex64::new(5.0, 5.0)
}

/// `n` energies spread over the lowest levels, clear of the pole grid.
pub fn energies(n: usize) -> Vec<f64> {
    (0..n).map(|k| -0.37 + 20.0 * k as f64 / n as f64).collect()
}
