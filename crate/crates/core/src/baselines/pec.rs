//! Pauli probabilistic error cancellation on Bob's half of a noisy pair.

use rand::Rng;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::noise::depolarize1;
use crate::qcore::{kernel, ComplexMatrix, DensityOp, Kind, Pauli};
use crate::rng;
use crate::states::BellDiagonalParams;
use crate::vpure::{select_gate, Shots};

/// Signed weights on the corrections I⊗I, I⊗X, I⊗Y, I⊗Z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuasiProbDecomp {
    pub q: [f64; 4],
    pub gamma: f64,
}

impl QuasiProbDecomp {
    /// No normalization check, so perturbed decompositions can be built on purpose.
    pub fn from_coefficients(q: [f64; 4]) -> Self {
        Self { q, gamma: q.iter().map(|x| x.abs()).sum() }
    }

    pub fn identity() -> Self {
        Self::from_coefficients([1.0, 0.0, 0.0, 0.0])
    }

    pub fn validate(&self) -> Result<()> {
        let s: f64 = self.q.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter { name: "sum(q)", value: s, range: "1 ± 1e-12" });
        }
        Ok(())
    }
}

pub fn pec_inverse_werner(eps: f64) -> Result<QuasiProbDecomp> {
    if !(eps.is_finite() && (0.0..0.75).contains(&eps)) {
        return Err(Error::Parameter { name: "eps", value: eps, range: "[0, 0.75)" });
    }
    let d = 3.0 - 4.0 * eps;
    let off = -eps / d;
    Ok(QuasiProbDecomp::from_coefficients([(3.0 - eps) / d, off, off, off]))
}

/// Inverts the Pauli channel on Bob's qubit through its eigenvalues
/// λ_X = 1 − 2(ε_y+ε_z) and cyclic, then q_P = ¼ Σ_Q χ(P,Q)/λ_Q.
pub fn pec_inverse_bell_diagonal(p: &BellDiagonalParams) -> Result<QuasiProbDecomp> {
    let (ex, ey, ez) = (p.eps_x(), p.eps_y(), p.eps_z());
    let lam = [1.0 - 2.0 * (ey + ez), 1.0 - 2.0 * (ex + ez), 1.0 - 2.0 * (ex + ey)];
    if let Some(&bad) = lam.iter().find(|l| **l <= 0.0) {
        return Err(Error::Parameter { name: "pairwise error sum", value: (1.0 - bad) / 2.0, range: "< 1/2" });
    }
    let [ix, iy, iz] = lam.map(|l| 1.0 / l);
    Ok(QuasiProbDecomp::from_coefficients([
        0.25 * (1.0 + ix + iy + iz),
        0.25 * (1.0 + ix - iy - iz),
        0.25 * (1.0 - ix + iy - iz),
        0.25 * (1.0 - ix - iy + iz),
    ]))
}

fn check_pair(rho: &DensityOp) -> Result<()> {
    if rho.qubits() != 2 {
        return Err(Error::Dimension(format!("PEC acts on a pair, got {} qubits", rho.qubits())));
    }
    Ok(())
}

fn apply(rho: &DensityOp, d: &QuasiProbDecomp, p1: f64) -> Result<DensityOp> {
    check_pair(rho)?;
    let e1 = depolarize1(p1)?;
    let mut acc = ComplexMatrix::zeros(4);
    for (&w, p) in d.q.iter().zip(Pauli::ALL) {
        if w == 0.0 {
            continue;
        }
        let term = if p == Pauli::I {
            rho.matrix().clone()
        } else {
            e1.act(&kernel::conjugate_pauli(rho.matrix(), &[p], &[1]), &[1])
        };
        acc.add_scaled(&term, w)?;
    }
    Ok(DensityOp::from_parts(acc, Kind::Virtual))
}

/// Σ_P q_P (I⊗P) ρ (I⊗P), the quasi-probability mixture PEC estimates.
pub fn pec_apply_exact(rho: &DensityOp, d: &QuasiProbDecomp) -> Result<DensityOp> {
    apply(rho, d, 0.0)
}

/// As [`pec_apply_exact`], with each inserted Pauli followed by 𝓔₁.
pub fn pec_apply_noisy(rho: &DensityOp, d: &QuasiProbDecomp, p1: f64) -> Result<DensityOp> {
    apply(rho, d, p1)
}

fn proj(bit: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(bit, bit)] = 1.0.into();
    m
}

fn x_proj(sign: usize) -> ComplexMatrix {
    let s = if sign == 0 { 0.5 } else { -0.5 };
    let mut m = ComplexMatrix::identity(2).scale_real(0.5);
    m[(0, 1)] = s.into();
    m[(1, 0)] = s.into();
    m
}

fn measure_and_correct(m: &ComplexMatrix, kraus: [ComplexMatrix; 2], targets: &[usize]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(m.dim());
    for k in kraus {
        let t = kernel::right(&kernel::left(m, &k, targets), &k.adjoint(), targets);
        out.add_scaled(&t, 1.0).unwrap();
    }
    out
}

/// Remote CNOT by gate teleportation on [c, t, e_A, e_B], consuming the
/// resource pair (e_A, e_B). Alice copies c onto e_A and reads it in Z, Bob
/// fixes e_B with X, applies CNOT e_B → t and reads e_B in X, Alice fixes c with Z.
fn remote_cnot(ct: &ComplexMatrix, resource: &DensityOp) -> Result<ComplexMatrix> {
    let cnot = select_gate(Pauli::I, Pauli::X);
    let x = Pauli::X.matrix();
    let z = Pauli::Z.matrix();
    let id = ComplexMatrix::identity(2);
    let mut m = ct.kron(resource.matrix())?;
    m = kernel::conjugate(&m, &cnot, &[0, 2]);
    m = measure_and_correct(&m, [proj(0).kron(&id)?, proj(1).kron(&x)?], &[2, 3]);
    m = kernel::conjugate(&m, &cnot, &[3, 1]);
    m = measure_and_correct(&m, [id.kron(&x_proj(0))?, z.kron(&x_proj(1))?], &[0, 3]);
    Ok(kernel::partial_trace(&m, &[0, 1]))
}

/// Probability of an even outcome on |00⟩ after `n_gates` noisy remote CNOTs.
pub fn remote_cnot_parity(true_eps: f64, n_gates: u32) -> Result<f64> {
    let resource = crate::states::werner(true_eps)?;
    let mut ct = ComplexMatrix::zeros(4);
    ct[(0, 0)] = 1.0.into();
    for _ in 0..n_gates {
        ct = remote_cnot(&ct, &resource)?;
    }
    Ok(ct[(0, 0)].re + ct[(3, 3)].re)
}

/// Fits P = [1 + (1 − 4ε/3)^n]/2 through the measured even-parity rate.
pub fn pec_estimate_eps(true_eps: f64, n_gates: u32, shots: Shots, seed: u64) -> Result<f64> {
    check_range("true_eps", true_eps, 0.0, 1.0, "[0, 1]")?;
    if n_gates == 0 || n_gates % 2 != 0 {
        return Err(Error::Parameter { name: "n_gates", value: n_gates as f64, range: "positive even" });
    }
    let p = remote_cnot_parity(true_eps, n_gates)?.clamp(0.0, 1.0);
    let measured = match shots {
        Shots::Exact => p,
        Shots::Finite(n) => {
            let mut r = rng::stream(seed, "pec-estimate", 0);
            (0..n).filter(|_| r.gen_bool(p)).count() as f64 / n as f64
        }
    };
    let contrast = 2.0 * measured - 1.0;
    if !(contrast > 0.0 && contrast <= 1.0 + 1e-12) {
        return Err(Error::Estimation(format!("even-parity rate {measured} outside (1/2, 1]")));
    }
    Ok(0.75 * (1.0 - contrast.min(1.0).powf(1.0 / n_gates as f64)))
}
