//! Noise channels and the (p1, p2, p_mes) record threaded through every experiment.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};
use crate::qcore::{Channel, ComplexMatrix, Pauli, PauliString, Phase};

/// Depolarizing rates after one- and two-qubit gates, and the ancilla readout flip rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub p1: f64,
    pub p2: f64,
    pub p_mes: f64,
}

impl NoiseParams {
    pub fn new(p1: f64, p2: f64, p_mes: f64) -> Result<Self> {
        let n = Self { p1, p2, p_mes };
        n.validate()?;
        Ok(n)
    }

    pub fn zero() -> Self {
        Self { p1: 0.0, p2: 0.0, p_mes: 0.0 }
    }

    /// (0.001, 0.01, 0.03)
    pub fn reference() -> Self {
        Self { p1: 0.001, p2: 0.01, p_mes: 0.03 }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("p1", self.p1, 0.0, 0.75, "[0, 0.75]")?;
        check_range("p2", self.p2, 0.0, 15.0 / 16.0, "[0, 15/16]")?;
        check_range("p_mes", self.p_mes, 0.0, 1.0, "[0, 1]")
    }

    pub fn with_p_mes(self, p_mes: f64) -> Self {
        Self { p_mes, ..self }
    }
}

fn single(p: Pauli) -> PauliString {
    PauliString::new(vec![p], Phase::PlusOne)
}

/// Weight 1-p1 on I and p1/3 on each of X, Y, Z.
pub fn depolarize1(p1: f64) -> Result<Channel> {
    check_range("p1", p1, 0.0, 0.75, "[0, 0.75]")?;
    Channel::pauli_mixture(
        Pauli::ALL.iter().map(|&p| (if p == Pauli::I { 1.0 - p1 } else { p1 / 3.0 }, single(p))).collect(),
    )
}

/// Weight 1-p2 on I⊗I and p2/15 on each other Pauli pair.
pub fn depolarize2(p2: f64) -> Result<Channel> {
    check_range("p2", p2, 0.0, 15.0 / 16.0, "[0, 15/16]")?;
    let mut terms = Vec::with_capacity(16);
    for &a in &Pauli::ALL {
        for &b in &Pauli::ALL {
            let w = if a == Pauli::I && b == Pauli::I { 1.0 - p2 } else { p2 / 15.0 };
            terms.push((w, PauliString::new(vec![a, b], Phase::PlusOne)));
        }
    }
    Channel::pauli_mixture(terms)
}

fn z_flip(name: &'static str, p: f64) -> Result<Channel> {
    check_range(name, p, 0.0, 1.0, "[0, 1]")?;
    Channel::pauli_mixture(vec![(1.0 - p, single(Pauli::I)), (p, single(Pauli::Z))])
}

/// Z flip with probability p_mes ahead of an X-basis readout.
pub fn readout_flip(p_mes: f64) -> Result<Channel> {
    z_flip("p_mes", p_mes)
}

/// Bit flip with probability p ahead of a Z-basis readout.
pub fn readout_flip_z(p_mes: f64) -> Result<Channel> {
    check_range("p_mes", p_mes, 0.0, 1.0, "[0, 1]")?;
    Channel::pauli_mixture(vec![(1.0 - p_mes, single(Pauli::I)), (p_mes, single(Pauli::X))])
}

pub fn dephasing(eps: f64) -> Result<Channel> {
    z_flip("eps", eps)
}

pub fn amplitude_damping(eps: f64) -> Result<Channel> {
    check_range("eps", eps, 0.0, 1.0, "[0, 1]")?;
    let c = |x: f64| C64::new(x, 0.0);
    let k0 = ComplexMatrix::from_vec(2, vec![c(1.0), c(0.0), c(0.0), c((1.0 - eps).sqrt())])?;
    let k1 = ComplexMatrix::from_vec(2, vec![c(0.0), c(eps.sqrt()), c(0.0), c(0.0)])?;
    Channel::kraus(vec![k0, k1])
}
