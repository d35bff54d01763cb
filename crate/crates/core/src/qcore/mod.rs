//! Dense density-matrix primitives for registers of at most [`MAX_QUBITS`] qubits.
//!
//! Qubit 0 is the leftmost tensor factor. `tensor(a, b)` puts `a` on the low
//! qubit indices, and a two-qubit operator applied to targets `[s, t]` acts
//! with its first factor on `s`.

mod channel;
mod density;
pub(crate) mod kernel;
mod matrix;
mod pauli;

pub use channel::{Channel, ChannelRepr, KRAUS_TOL, MIXTURE_TOL};
pub use density::{DensityOp, Kind, HERMITIAN_TOL, POSITIVITY_TOL, TRACE_TOL};
pub use matrix::{ComplexMatrix, MAX_QUBITS};
pub use pauli::{Pauli, PauliString, Phase};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const IMAG_TOL: f64 = 1e-10;
pub const DEGENERATE_TRACE: f64 = 1e-14;

/// Kronecker product for matrices and density operators.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

impl Tensor for ComplexMatrix {
    fn tensor(&self, other: &Self) -> Result<Self> {
        self.kron(other)
    }
}

impl Tensor for DensityOp {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let kind = if self.is_physical() && other.is_physical() { Kind::Physical } else { Kind::Virtual };
        Ok(DensityOp::from_parts(self.matrix().kron(other.matrix())?, kind))
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}

/// Tensor product of a nonempty list, left to right.
pub fn tensor_all(ops: &[DensityOp]) -> Result<DensityOp> {
    let (first, rest) = ops.split_first().ok_or_else(|| Error::Dimension("empty tensor product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, op| acc.tensor(op))
}

pub fn apply_channel(rho: &DensityOp, ch: &Channel, targets: &[usize]) -> Result<DensityOp> {
    kernel::check_targets(rho.qubits(), targets, ch.arity())?;
    Ok(DensityOp::from_parts(ch.act(rho.matrix(), targets), rho.kind()))
}

/// U ρ U^dag on the given targets.
pub fn apply_unitary(rho: &DensityOp, u: &ComplexMatrix, targets: &[usize]) -> Result<DensityOp> {
    kernel::check_targets(rho.qubits(), targets, u.qubits())?;
    Ok(DensityOp::from_parts(kernel::conjugate(rho.matrix(), u, targets), rho.kind()))
}

/// A ρ B on the given targets: generally not Hermitian, so returned as a raw matrix.
pub fn sandwich(rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, targets: &[usize]) -> Result<ComplexMatrix> {
    kernel::check_targets(rho.qubits(), targets, a.qubits())?;
    kernel::check_targets(rho.qubits(), targets, b.qubits())?;
    Ok(kernel::right(&kernel::left(rho, a, targets), b, targets))
}

/// Tr_{qubits}[(op on qubits) · ρ], leaving the remaining qubits in ascending order.
pub fn contract(rho: &DensityOp, op: &ComplexMatrix, qubits: &[usize]) -> Result<DensityOp> {
    kernel::check_targets(rho.qubits(), qubits, op.qubits())?;
    let keep: Vec<usize> = (0..rho.qubits()).filter(|q| !qubits.contains(q)).collect();
    if keep.is_empty() {
        return Err(Error::Targets("contraction leaves no qubits".into()));
    }
    let m = kernel::left(rho.matrix(), op, qubits);
    Ok(DensityOp::from_parts(kernel::partial_trace(&m, &keep), Kind::Virtual))
}

pub fn expectation(rho: &DensityOp, obs: &ComplexMatrix) -> Result<f64> {
    if obs.dim() != rho.dim() {
        return Err(Error::Dimension(format!("observable {} vs state {}", obs.dim(), rho.dim())));
    }
    let h = obs.hermiticity_defect();
    if h > HERMITIAN_TOL {
        return Err(Error::NotHermitian(h));
    }
    real_part(obs.trace_product(rho.matrix())?)
}

pub fn expectation_pauli(rho: &DensityOp, obs: &PauliString) -> Result<f64> {
    if obs.len() != rho.qubits() {
        return Err(Error::Dimension(format!("Pauli string on {} qubits vs state on {}", obs.len(), rho.qubits())));
    }
    if !obs.phase().is_real() {
        return Err(Error::NotHermitian(2.0));
    }
    let targets: Vec<usize> = (0..obs.len()).collect();
    let mut m = rho.matrix().clone();
    for (q, &p) in obs.letters().iter().enumerate() {
        if p != Pauli::I {
            m = kernel::left(&m, &p.matrix(), &targets[q..=q]);
        }
    }
    real_part(m.trace() * obs.phase().value())
}

fn real_part(z: C64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// |Ψ_Bell⟩⟨Ψ_Bell| with |Ψ_Bell⟩ = (|00⟩ + |11⟩)/√2.
pub fn bell_projector() -> ComplexMatrix {
    ComplexMatrix::from_real(4, &[0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5])
        .unwrap()
}

/// P_Bell on each of n consecutive qubit pairs.
pub fn bell_projector_product(n: usize) -> Result<ComplexMatrix> {
    let p = bell_projector();
    (1..n).try_fold(p.clone(), |acc, _| acc.kron(&p))
}

pub fn bell_fidelity(rho: &DensityOp) -> Result<f64> {
    if rho.qubits() != 2 {
        return Err(Error::Dimension(format!("Bell fidelity needs 2 qubits, got {}", rho.qubits())));
    }
    let tr = rho.trace();
    if tr.abs() < DEGENERATE_TRACE {
        return Err(Error::DegenerateDenominator(tr));
    }
    Ok(expectation(rho, &bell_projector())? / tr)
}

pub fn partial_trace(rho: &DensityOp, keep: &[usize]) -> Result<DensityOp> {
    if keep.is_empty() {
        return Err(Error::Targets("empty keep set".into()));
    }
    kernel::check_targets(rho.qubits(), keep, keep.len())?;
    Ok(DensityOp::from_parts(kernel::partial_trace(rho.matrix(), keep), rho.kind()))
}
