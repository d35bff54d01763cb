//! Shared fixtures for the benchmarks.

use vpure_core::states::werner;
use vpure_core::{DensityOp, NoiseParams};

pub const EPS: f64 = 0.1;

pub fn noise() -> NoiseParams {
    NoiseParams::reference()
}

pub fn werner_inputs(n: usize) -> Vec<DensityOp> {
    vec![werner(EPS).expect("valid infidelity"); n]
}
