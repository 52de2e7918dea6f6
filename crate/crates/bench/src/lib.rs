//! Shared fixtures for the benchmarks.

use biwave::{Atom, Complex64, DiracParams, SampledFunction};

/// Gaussian bump centred at `q = 2` on a uniform grid of `points` nodes in [0.25, 3.75].
pub fn bump(points: usize) -> SampledFunction {
    let h = 3.5 / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|k| 0.25 + h * k as f64).collect();
    SampledFunction::from_fn(grid, 0.0, |q| Complex64::new((-(q - 2.0).powi(2) / 0.125).exp(), 0.0))
        .expect("valid grid")
}

/// `e^{−q}`.
pub fn exponential() -> Atom {
    Atom::new(Complex64::new(1.0, 0.0), 1.0, Complex64::new(0.0, 1.0)).expect("valid atom")
}

pub fn params() -> DiracParams {
    DiracParams::new(1.0, 0.6, -1.0).expect("valid parameters")
}
