use super::matrix::{ComplexMatrix, MAX_QUBITS};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = -1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Physical,
    /// Unnormalized, possibly indefinite intermediate such as S_i ρ S_j + h.c.
    Virtual,
}

/// Hermitian operator on `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp {
    matrix: ComplexMatrix,
    kind: Kind,
}

impl DensityOp {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn physical(matrix: ComplexMatrix) -> Result<Self> {
        Self::check_size(&matrix)?;
        let h = matrix.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::NotHermitian(h));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::NotPhysical(format!("trace {tr}")));
        }
        let min = matrix.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::NotPhysical(format!("minimum eigenvalue {min:e}")));
        }
        Ok(Self { matrix, kind: Kind::Physical })
    }

    /// Validates Hermiticity only.
    pub fn virtual_op(matrix: ComplexMatrix) -> Result<Self> {
        Self::check_size(&matrix)?;
        let h = matrix.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::NotHermitian(h));
        }
        Ok(Self { matrix, kind: Kind::Virtual })
    }

    /// Skips validation; for results of maps that preserve the invariants.
    pub(crate) fn from_parts(matrix: ComplexMatrix, kind: Kind) -> Self {
        Self { matrix, kind }
    }

    fn check_size(m: &ComplexMatrix) -> Result<()> {
        if m.qubits() > MAX_QUBITS {
            return Err(Error::TooLarge { qubits: m.qubits(), max: MAX_QUBITS });
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.matrix.qubits()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn is_physical(&self) -> bool {
        self.kind == Kind::Physical
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn to_json(&self) -> String {
        self.matrix.to_json()
    }

    /// Convex or signed combination; the result is virtual unless every
    /// weight is nonnegative, the weights sum to one and every input is physical.
    pub fn combine(terms: &[(f64, &DensityOp)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Dimension("empty combination".into()))?;
        let mut acc = ComplexMatrix::zeros(first.1.dim());
        for (w, op) in terms {
            acc.add_scaled(op.matrix(), *w)?;
        }
        let convex = terms.iter().all(|(w, op)| *w >= 0.0 && op.is_physical())
            && (terms.iter().map(|(w, _)| w).sum::<f64>() - 1.0).abs() <= 1e-12;
        Ok(Self::from_parts(acc, if convex { Kind::Physical } else { Kind::Virtual }))
    }
}
