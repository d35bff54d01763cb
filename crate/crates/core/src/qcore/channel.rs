use num_complex::Complex64 as C64;

use super::kernel;
use super::matrix::ComplexMatrix;
use super::pauli::PauliString;
use crate::error::{Error, Result};

pub const KRAUS_TOL: f64 = 1e-10;
pub const MIXTURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelRepr {
    Kraus(Vec<ComplexMatrix>),
    /// (probability, Pauli) pairs; string phases are irrelevant under conjugation.
    PauliMixture(Vec<(f64, PauliString)>),
}

/// Completely positive trace-preserving map on `arity` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    repr: ChannelRepr,
    arity: usize,
}

impl Channel {
    pub fn kraus(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::InvalidChannel("empty Kraus list".into()))?;
        let dim = first.dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &ops {
            if k.dim() != dim {
                return Err(Error::InvalidChannel("Kraus operators of differing dimension".into()));
            }
            sum.add_scaled(&k.adjoint().matmul(k)?, 1.0)?;
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if defect > KRAUS_TOL {
            return Err(Error::InvalidChannel(format!("sum K^dag K deviates from identity by {defect:e}")));
        }
        Ok(Self { arity: first.qubits(), repr: ChannelRepr::Kraus(ops) })
    }

    pub fn pauli_mixture(terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidChannel("empty Pauli mixture".into()))?;
        let arity = first.1.len();
        if terms.iter().any(|(_, p)| p.len() != arity) {
            return Err(Error::InvalidChannel("Pauli strings of differing length".into()));
        }
        if let Some((p, _)) = terms.iter().find(|(p, _)| p.is_nan() || *p < 0.0) {
            return Err(Error::InvalidChannel(format!("negative probability {p}")));
        }
        let total: f64 = terms.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > MIXTURE_TOL {
            return Err(Error::InvalidChannel(format!("probabilities sum to {total}")));
        }
        Ok(Self { arity, repr: ChannelRepr::PauliMixture(terms) })
    }

    pub fn identity(arity: usize) -> Self {
        Self { arity, repr: ChannelRepr::PauliMixture(vec![(1.0, PauliString::identity(arity))]) }
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_unitary(KRAUS_TOL) {
            return Err(Error::NotUnitary("channel from non-unitary matrix".into()));
        }
        Self::kraus(vec![u])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn repr(&self) -> &ChannelRepr {
        &self.repr
    }

    pub fn to_kraus(&self) -> Self {
        match &self.repr {
            ChannelRepr::Kraus(_) => self.clone(),
            ChannelRepr::PauliMixture(terms) => {
                let ops = terms
                    .iter()
                    .filter(|(p, _)| *p > 0.0)
                    .map(|(p, s)| s.to_matrix().scale(C64::new(p.sqrt(), 0.0)))
                    .collect();
                Self { arity: self.arity, repr: ChannelRepr::Kraus(ops) }
            }
        }
    }

    /// Applies the map to any operator (physical or not). Targets must already be validated.
    pub(crate) fn act(&self, m: &ComplexMatrix, targets: &[usize]) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(m.dim());
        match &self.repr {
            ChannelRepr::Kraus(ops) => {
                if ops.len() == 1 {
                    return kernel::conjugate(m, &ops[0], targets);
                }
                for k in ops {
                    acc.add_scaled(&kernel::conjugate(m, k, targets), 1.0).unwrap();
                }
            }
            ChannelRepr::PauliMixture(terms) => {
                for (p, s) in terms {
                    if *p == 0.0 {
                        continue;
                    }
                    if s.letters().iter().all(|l| *l == super::pauli::Pauli::I) {
                        acc.add_scaled(m, *p).unwrap();
                    } else {
                        acc.add_scaled(&kernel::conjugate_pauli(m, s.letters(), targets), *p).unwrap();
                    }
                }
            }
        }
        acc
    }
}
