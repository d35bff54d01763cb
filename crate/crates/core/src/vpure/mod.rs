//! Virtual purification: stabilizer-sampled gadget circuits, exact and
//! sampled estimators, ancilla reuse, the separable-ancilla variant, the
//! generalized Hadamard test, and sampling-cost accounting.

mod circuit;
mod engine;
mod gamma;
mod hadamard;
mod knitting;
mod mc;
mod reuse;
mod stabilizer;

pub use circuit::{push_gadget, push_readout, sampled_circuit, select_gate, Circuit, GadgetWires, Op};
pub use engine::{exact_virtual, AncillaMode, Downstream, ParityReadout, Protocol, VirtualEstimate};
pub use gamma::{gamma_fresh, gamma_reuse, knitting_bound, per_bell_overhead, virtual_yield};
pub use hadamard::{hadamard_test, random_su2, HadamardTestSpec};
pub use knitting::{knitting_protocol, knitting_variant, Shots};
pub use mc::{mc_virtual, SHARD_SHOTS};
pub use reuse::reuse_extrapolate;
pub use stabilizer::{gadget_terms, ideal_insertion, StabilizerSet, StabilizerTerm, TermSet};
