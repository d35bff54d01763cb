//! Virtual entanglement purification of noisy Bell pairs, with double
//! selection, Pauli PEC and circuit knitting as baselines.
//!
//! Qubit 0 is the most significant bit of a basis index.

pub mod baselines;
pub mod error;
pub mod harness;
pub mod noise;
pub mod qcore;
pub mod rng;
pub mod states;
pub mod vpure;

pub use error::{Error, Result};
pub use noise::NoiseParams;
pub use qcore::{Channel, ComplexMatrix, DensityOp, Kind, Pauli, PauliString, Phase};
pub use states::BellDiagonalParams;
pub use vpure::{AncillaMode, Shots, VirtualEstimate};
