//! Two-qubit states: Bell, Werner, Bell-diagonal, locally damped Bell pairs,
//! separable ancillas, and the analytic twirls.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::noise::{amplitude_damping, dephasing};
use crate::qcore::{apply_channel, bell_fidelity, bell_projector, Channel, ComplexMatrix, DensityOp};

const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Bell basis in the order (Φ+, Ψ_x, Ψ_y, Ψ_z): Ψ_P ∝ (I⊗P)Φ+ up to phase.
pub fn bell_basis() -> [[C64; 4]; 4] {
    let c = |x: f64| C64::new(x, 0.0);
    [
        [c(S), c(0.0), c(0.0), c(S)],
        [c(0.0), c(S), c(S), c(0.0)],
        [c(0.0), c(-S), c(S), c(0.0)],
        [c(S), c(0.0), c(0.0), c(-S)],
    ]
}

/// Non-Bell weights of a Bell-diagonal state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    eps_x: f64,
    eps_y: f64,
    eps_z: f64,
}

impl BellDiagonalParams {
    pub fn new(eps_x: f64, eps_y: f64, eps_z: f64) -> Result<Self> {
        check_range("eps_x", eps_x, 0.0, 1.0, "[0, 1]")?;
        check_range("eps_y", eps_y, 0.0, 1.0, "[0, 1]")?;
        check_range("eps_z", eps_z, 0.0, 1.0, "[0, 1]")?;
        let eps = eps_x + eps_y + eps_z;
        check_range("eps_x + eps_y + eps_z", eps, 0.0, 1.0 + 1e-15, "[0, 1]")?;
        Ok(Self { eps_x, eps_y, eps_z })
    }

    pub fn werner(eps: f64) -> Result<Self> {
        Self::new(eps / 3.0, eps / 3.0, eps / 3.0)
    }

    pub fn eps_x(&self) -> f64 {
        self.eps_x
    }

    pub fn eps_y(&self) -> f64 {
        self.eps_y
    }

    pub fn eps_z(&self) -> f64 {
        self.eps_z
    }

    pub fn eps(&self) -> f64 {
        self.eps_x + self.eps_y + self.eps_z
    }

    /// (1-ε, ε_x, ε_y, ε_z)
    pub fn weights(&self) -> [f64; 4] {
        [1.0 - self.eps(), self.eps_x, self.eps_y, self.eps_z]
    }
}

pub fn bell() -> DensityOp {
    DensityOp::physical(bell_projector()).unwrap()
}

/// (1 - 4ε/3) ρ_Bell + ε I/3
pub fn werner(eps: f64) -> Result<DensityOp> {
    check_range("eps", eps, 0.0, 1.0, "[0, 1]")?;
    let mut m = bell_projector().scale_real(1.0 - 4.0 * eps / 3.0);
    m.add_scaled(&ComplexMatrix::identity(4), eps / 3.0)?;
    DensityOp::physical(m)
}

pub fn bell_diagonal(p: &BellDiagonalParams) -> Result<DensityOp> {
    let mut m = ComplexMatrix::zeros(4);
    for (w, v) in p.weights().iter().zip(bell_basis()) {
        m.add_scaled(&ComplexMatrix::outer(&v)?, *w)?;
    }
    DensityOp::physical(m)
}

pub fn plus_plus() -> DensityOp {
    DensityOp::physical(ComplexMatrix::from_real(4, &[0.25; 16]).unwrap()).unwrap()
}

/// |00⟩⟨00|
pub fn zero_zero() -> DensityOp {
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 0)] = C64::new(1.0, 0.0);
    DensityOp::physical(m).unwrap()
}

fn locally_damped(ch: &Channel) -> Result<DensityOp> {
    let rho = apply_channel(&bell(), ch, &[0])?;
    apply_channel(&rho, ch, &[1])
}

/// Amplitude damping with rate ε on both halves of a Bell pair.
pub fn amp_damped_bell(eps: f64) -> Result<DensityOp> {
    locally_damped(&amplitude_damping(eps)?)
}

/// Dephasing with rate ε on both halves of a Bell pair.
pub fn dephased_bell(eps: f64) -> Result<DensityOp> {
    locally_damped(&dephasing(eps)?)
}

fn require_physical_pair(rho: &DensityOp) -> Result<()> {
    if rho.qubits() != 2 {
        return Err(Error::Dimension(format!("twirl needs 2 qubits, got {}", rho.qubits())));
    }
    if !rho.is_physical() {
        return Err(Error::NotPhysical("twirl of a virtual operator".into()));
    }
    Ok(())
}

/// Fidelity-preserving projection onto the Werner family.
pub fn twirl_to_werner(rho: &DensityOp) -> Result<DensityOp> {
    require_physical_pair(rho)?;
    let f = bell_fidelity(rho)?.clamp(0.0, 1.0);
    werner(1.0 - f)
}

/// Populations of a two-qubit operator in the Bell basis, (Φ+, Ψ_x, Ψ_y, Ψ_z).
pub fn bell_weights(rho: &DensityOp) -> Result<[f64; 4]> {
    if rho.qubits() != 2 {
        return Err(Error::Dimension(format!("Bell weights need 2 qubits, got {}", rho.qubits())));
    }
    let m = rho.matrix();
    let mut w = [0.0; 4];
    for (k, v) in bell_basis().iter().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                acc += v[i].conj() * m[(i, j)] * v[j];
            }
        }
        w[k] = acc.re;
    }
    Ok(w)
}

/// Drops all Bell-basis coherences, keeping the three error weights distinct.
pub fn twirl_to_bell_diagonal(rho: &DensityOp) -> Result<DensityOp> {
    require_physical_pair(rho)?;
    let w = bell_weights(rho)?;
    let tr: f64 = w.iter().sum();
    let cl = |x: f64| (x / tr).max(0.0);
    bell_diagonal(&BellDiagonalParams::new(cl(w[1]), cl(w[2]), cl(w[3]))?)
}
