//! Gate-level gadget circuits.
//!
//! A gadget couples one ancilla pair (a_A, a_B) to one target pair (t_A, t_B).
//! For term (k, b):
//! - k = b = 0: nothing happens.
//! - k = b = p: each party applies its Pauli of S_p to its target half, each
//!   followed by single-qubit depolarization.
//! - k != b: each party applies the two-qubit select gate
//!   |0⟩⟨0| ⊗ P_b + |1⟩⟨1| ⊗ P_k on (ancilla half, target half), followed by
//!   two-qubit depolarization on that pair. When one of P_k, P_b is the
//!   identity this is an ordinary controlled Pauli.
//!
//! A Bell ancilla then carries S_k ρ S_b on its |11⟩⟨00| block, which the final
//! X⊗X parity readout picks up.

use super::stabilizer::{StabilizerSet, StabilizerTerm};
use crate::error::Result;
use crate::noise::{depolarize1, depolarize2, readout_flip, NoiseParams};
use crate::qcore::{kernel, Channel, ChannelRepr, ComplexMatrix, DensityOp, Pauli};

#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate { u: ComplexMatrix, targets: Vec<usize> },
    Pauli { letters: Vec<Pauli>, targets: Vec<usize> },
    Noise { channel: Channel, targets: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qubits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Self {
        Self { qubits, ops: Vec::new() }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn push(&mut self, op: Op) -> Result<()> {
        let (arity, targets) = match &op {
            Op::Gate { u, targets } => (u.qubits(), targets),
            Op::Pauli { letters, targets } => (letters.len(), targets),
            Op::Noise { channel, targets } => (channel.arity(), targets),
        };
        kernel::check_targets(self.qubits, targets, arity)?;
        self.ops.push(op);
        Ok(())
    }

    /// Skips noise channels that are exactly the identity.
    fn push_noise(&mut self, channel: Channel, targets: Vec<usize>) -> Result<()> {
        if let ChannelRepr::PauliMixture(t) = channel.repr() {
            if t.iter().all(|(p, s)| *p == 0.0 || s.letters().iter().all(|l| *l == Pauli::I)) {
                return Ok(());
            }
        }
        self.push(Op::Noise { channel, targets })
    }

    pub(crate) fn run(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut cur = m.clone();
        for op in &self.ops {
            cur = match op {
                Op::Gate { u, targets } => kernel::conjugate(&cur, u, targets),
                Op::Pauli { letters, targets } => kernel::conjugate_pauli(&cur, letters, targets),
                Op::Noise { channel, targets } => channel.act(&cur, targets),
            };
        }
        cur
    }

    pub fn apply(&self, rho: &DensityOp) -> Result<DensityOp> {
        if rho.qubits() != self.qubits {
            return Err(crate::Error::Dimension(format!("circuit on {} qubits, state on {}", self.qubits, rho.qubits())));
        }
        Ok(DensityOp::from_parts(self.run(rho.matrix()), rho.kind()))
    }

    /// The whole circuit as one Kraus channel.
    pub fn to_channel(&self) -> Result<Channel> {
        let dim = 1usize << self.qubits;
        let mut kraus = vec![ComplexMatrix::identity(dim)];
        for op in &self.ops {
            kraus = match op {
                Op::Gate { u, targets } => kraus.iter().map(|k| kernel::left(k, u, targets)).collect(),
                Op::Pauli { letters, targets } => {
                    let u = letters.iter().fold(ComplexMatrix::identity(1), |a, p| a.kron(&p.matrix()).unwrap());
                    kraus.iter().map(|k| kernel::left(k, &u, targets)).collect()
                }
                Op::Noise { channel, targets } => {
                    let ChannelRepr::Kraus(ops) = channel.to_kraus().repr().clone() else { unreachable!() };
                    let mut next = Vec::with_capacity(kraus.len() * ops.len());
                    for e in &ops {
                        for k in &kraus {
                            next.push(kernel::left(k, e, targets));
                        }
                    }
                    next
                }
            };
        }
        Channel::kraus(kraus)
    }
}

/// Qubit positions of one gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GadgetWires {
    pub anc: [usize; 2],
    pub tgt: [usize; 2],
}

/// |0⟩⟨0| ⊗ P0 + |1⟩⟨1| ⊗ P1 on (control, target).
pub fn select_gate(p0: Pauli, p1: Pauli) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(4);
    let (m0, m1) = (p0.matrix(), p1.matrix());
    for r in 0..2 {
        for c in 0..2 {
            g[(r, c)] = m0[(r, c)];
            g[(2 + r, 2 + c)] = m1[(r, c)];
        }
    }
    g
}

pub fn push_gadget(
    circuit: &mut Circuit,
    set: &StabilizerSet,
    term: StabilizerTerm,
    noise: &NoiseParams,
    wires: GadgetWires,
) -> Result<()> {
    if term.is_identity() {
        return Ok(());
    }
    if term.is_local() {
        let p = set.letter(term.ket);
        for &t in &wires.tgt {
            circuit.push(Op::Pauli { letters: vec![p], targets: vec![t] })?;
            circuit.push_noise(depolarize1(noise.p1)?, vec![t])?;
        }
        return Ok(());
    }
    let g = select_gate(set.letter(term.bra), set.letter(term.ket));
    for party in 0..2 {
        let targets = vec![wires.anc[party], wires.tgt[party]];
        circuit.push(Op::Gate { u: g.clone(), targets: targets.clone() })?;
        circuit.push_noise(depolarize2(noise.p2)?, targets)?;
    }
    Ok(())
}

/// Readout flips ahead of the ancilla parity measurement.
pub fn push_readout(circuit: &mut Circuit, noise: &NoiseParams, anc: [usize; 2]) -> Result<()> {
    for a in anc {
        circuit.push_noise(readout_flip(noise.p_mes)?, vec![a])?;
    }
    Ok(())
}

/// The noisy circuit for one term on the register [a_A, a_B, t_A, t_B],
/// including the readout flips.
pub fn sampled_circuit(term: StabilizerTerm, noise: &NoiseParams) -> Result<Circuit> {
    let mut c = Circuit::new(4);
    push_gadget(&mut c, &StabilizerSet::standard(), term, noise, GadgetWires { anc: [0, 1], tgt: [2, 3] })?;
    push_readout(&mut c, noise, [0, 1])?;
    Ok(c)
}

pub(crate) fn x_parity() -> ComplexMatrix {
    Pauli::X.matrix().kron(&Pauli::X.matrix()).unwrap()
}

pub(crate) fn y_parity() -> ComplexMatrix {
    Pauli::Y.matrix().kron(&Pauli::Y.matrix()).unwrap()
}
