//! Hadamard test with an entangled, possibly noisy, two-party control.
//!
//! Register: [a_A, a_B, system A..., system B...]. Party x applies
//! |0⟩⟨0| ⊗ V_x^dag + |1⟩⟨1| ⊗ U_x on (a_x, system x); then the downstream
//! channel acts on the system and X⊗X ⊗ O is measured.

use num_complex::Complex64 as C64;
use rand::Rng;

use super::circuit::x_parity;
use crate::error::{Error, Result};
use crate::qcore::{kernel, Channel, ComplexMatrix, DensityOp, HERMITIAN_TOL, KRAUS_TOL, MAX_QUBITS};

#[derive(Clone, Debug, PartialEq)]
pub struct HadamardTestSpec {
    u_a: ComplexMatrix,
    u_b: ComplexMatrix,
    v_a: ComplexMatrix,
    v_b: ComplexMatrix,
    input: DensityOp,
    downstream: Channel,
    observable: ComplexMatrix,
}

impl HadamardTestSpec {
    pub fn new(
        u_a: ComplexMatrix,
        u_b: ComplexMatrix,
        v_a: ComplexMatrix,
        v_b: ComplexMatrix,
        input: DensityOp,
        downstream: Channel,
        observable: ComplexMatrix,
    ) -> Result<Self> {
        for (name, u) in [("U_A", &u_a), ("U_B", &u_b), ("V_A", &v_a), ("V_B", &v_b)] {
            if !u.is_unitary(KRAUS_TOL) {
                return Err(Error::NotUnitary(name.into()));
            }
        }
        if u_a.dim() != v_a.dim() || u_b.dim() != v_b.dim() {
            return Err(Error::Dimension("U and V of one party differ in size".into()));
        }
        let q = u_a.qubits() + u_b.qubits();
        if input.qubits() != q || observable.qubits() != q || downstream.arity() != q {
            return Err(Error::Dimension(format!("input, observable and downstream must act on {q} qubits")));
        }
        if q + 2 > MAX_QUBITS {
            return Err(Error::TooLarge { qubits: q + 2, max: MAX_QUBITS });
        }
        let h = observable.hermiticity_defect();
        if h > HERMITIAN_TOL {
            return Err(Error::NotHermitian(h));
        }
        Ok(Self { u_a, u_b, v_a, v_b, input, downstream, observable })
    }

    fn system_targets(&self) -> Vec<usize> {
        (0..self.input.qubits()).collect()
    }

    /// ½ Tr[O 𝓤(U ρ V + h.c.)], evaluated without any ancilla.
    pub fn ideal_value(&self) -> Result<f64> {
        let u = self.u_a.kron(&self.u_b)?;
        let v = self.v_a.kron(&self.v_b)?;
        let m = u.matmul(self.input.matrix())?.matmul(&v)?;
        let h = &m + &m.adjoint();
        let out = self.downstream.act(&h.scale_real(0.5), &self.system_targets());
        Ok(self.observable.trace_product(&out)?.re)
    }
}

fn select(v_dag: &ComplexMatrix, u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.dim();
    let mut g = ComplexMatrix::zeros(2 * d);
    for r in 0..d {
        for c in 0..d {
            g[(r, c)] = v_dag[(r, c)];
            g[(d + r, d + c)] = u[(r, c)];
        }
    }
    g
}

/// (⟨X⊗X⊗O⟩, ⟨X⊗X⊗I⟩) with the given two-qubit control state.
pub fn hadamard_test(spec: &HadamardTestSpec, ancilla: &DensityOp) -> Result<(f64, f64)> {
    if ancilla.qubits() != 2 || !ancilla.is_physical() {
        return Err(Error::NotPhysical("control must be a physical two-qubit state".into()));
    }
    let qa = spec.u_a.qubits();
    let qb = spec.u_b.qubits();
    let mut sigma = ancilla.matrix().kron(spec.input.matrix())?;
    let ta: Vec<usize> = std::iter::once(0).chain(2..2 + qa).collect();
    let tb: Vec<usize> = std::iter::once(1).chain(2 + qa..2 + qa + qb).collect();
    sigma = kernel::conjugate(&sigma, &select(&spec.v_a.adjoint(), &spec.u_a), &ta);
    sigma = kernel::conjugate(&sigma, &select(&spec.v_b.adjoint(), &spec.u_b), &tb);
    let sys: Vec<usize> = (2..2 + qa + qb).collect();
    sigma = spec.downstream.act(&sigma, &sys);
    let m = kernel::partial_trace(&kernel::left(&sigma, &x_parity(), &[0, 1]), &sys);
    Ok((spec.observable.trace_product(&m)?.re, m.trace().re))
}

/// Haar-random SU(2) element [[a, -b*], [b, a*]].
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let u: f64 = rng.gen();
    let (phi, psi): (f64, f64) = (rng.gen::<f64>() * std::f64::consts::TAU, rng.gen::<f64>() * std::f64::consts::TAU);
    let a = C64::from_polar(u.sqrt(), phi);
    let b = C64::from_polar((1.0 - u).sqrt(), psi);
    ComplexMatrix::from_vec(2, vec![a, -b.conj(), b, a.conj()]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::Pauli;
    use crate::states::{bell, werner};
    use rand::SeedableRng;

    fn spec(seed: u64) -> HadamardTestSpec {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let z = Pauli::Z.matrix().kron(&Pauli::Z.matrix()).unwrap();
        let xi = Pauli::X.matrix().kron(&ComplexMatrix::identity(2)).unwrap();
        let obs = &z + &xi;
        HadamardTestSpec::new(
            random_su2(&mut rng),
            random_su2(&mut rng),
            random_su2(&mut rng),
            random_su2(&mut rng),
            werner(0.2).unwrap(),
            Channel::identity(2),
            obs,
        )
        .unwrap()
    }

    #[test]
    fn bell_control_reproduces_ideal() {
        for seed in 0..5 {
            let s = spec(seed);
            let (xo, _) = hadamard_test(&s, &bell()).unwrap();
            assert!((xo - s.ideal_value().unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn werner_control_scales() {
        let s = spec(9);
        let (xo, _) = hadamard_test(&s, &werner(0.3).unwrap()).unwrap();
        assert!((xo / s.ideal_value().unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        let bad = ComplexMatrix::identity(2).scale_real(2.0);
        let r = HadamardTestSpec::new(
            bad,
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(2),
            bell(),
            Channel::identity(2),
            ComplexMatrix::identity(4),
        );
        assert!(matches!(r, Err(Error::NotUnitary(_))));
    }
}
