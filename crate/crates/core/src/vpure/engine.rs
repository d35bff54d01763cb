//! Exact evaluation of the virtual purification estimator.

use serde::{Deserialize, Serialize};

use super::circuit::{push_gadget, push_readout, x_parity, y_parity, Circuit, GadgetWires};
use super::stabilizer::{gadget_terms, StabilizerSet, StabilizerTerm, TermSet};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::qcore::{
    kernel, tensor_all, Channel, ComplexMatrix, DensityOp, Kind, DEGENERATE_TRACE, HERMITIAN_TOL, IMAG_TOL,
    MAX_QUBITS,
};
use crate::states::werner;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AncillaMode {
    /// One ancilla pair per target pair, each measured right after its gadget.
    Fresh,
    /// A single ancilla pair threaded through every gadget, measured once.
    Reuse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VirtualEstimate {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
    pub gamma: f64,
    /// 0 for exact evaluation.
    pub n_shots: u64,
    pub stderr_ratio: f64,
}

/// Ancilla observables combined into the parity estimator Σ_w c_w ⟨B_w⟩.
/// Sampling picks branch w with probability |c_w| / Σ|c|, so γ grows by Σ|c|.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityReadout {
    branches: Vec<(f64, ComplexMatrix)>,
}

impl ParityReadout {
    /// X⊗X on an entangled ancilla.
    pub fn bell() -> Self {
        Self { branches: vec![(1.0, x_parity())] }
    }

    /// X⊗X − Y⊗Y on a separable |+⟩|+⟩ ancilla.
    pub fn knitting() -> Self {
        Self { branches: vec![(1.0, x_parity()), (-1.0, y_parity())] }
    }

    pub fn branches(&self) -> &[(f64, ComplexMatrix)] {
        &self.branches
    }

    pub fn scale(&self) -> f64 {
        self.branches.iter().map(|(c, _)| c.abs()).sum()
    }
}

/// A channel applied to the target register before the observable.
#[derive(Clone, Debug, PartialEq)]
pub struct Downstream {
    pub channel: Channel,
    pub targets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Protocol {
    pub set: StabilizerSet,
    pub ancilla: DensityOp,
    pub noise: NoiseParams,
    pub mode: AncillaMode,
    pub terms: TermSet,
    pub readout: ParityReadout,
    pub downstream: Option<Downstream>,
}

impl Protocol {
    pub fn new(ancilla: DensityOp, noise: NoiseParams, mode: AncillaMode) -> Result<Self> {
        if ancilla.qubits() != 2 {
            return Err(Error::Dimension(format!("ancilla must be a pair, got {} qubits", ancilla.qubits())));
        }
        noise.validate()?;
        Ok(Self {
            set: StabilizerSet::standard(),
            ancilla,
            noise,
            mode,
            terms: TermSet::Reduced,
            readout: ParityReadout::bell(),
            downstream: None,
        })
    }

    pub fn with_werner_ancilla(eps: f64, noise: NoiseParams, mode: AncillaMode) -> Result<Self> {
        Self::new(werner(eps)?, noise, mode)
    }

    pub fn terms(mut self, terms: TermSet) -> Self {
        self.terms = terms;
        self
    }

    pub fn readout(mut self, readout: ParityReadout) -> Self {
        self.readout = readout;
        self
    }

    pub fn stabilizers(mut self, set: StabilizerSet) -> Self {
        self.set = set;
        self
    }

    pub fn downstream(mut self, d: Downstream) -> Self {
        self.downstream = Some(d);
        self
    }

    pub(crate) fn ancilla_count(&self, n: usize) -> usize {
        match self.mode {
            AncillaMode::Fresh => n,
            AncillaMode::Reuse => 1,
        }
    }

    /// Ideal-scale γ numerator: (Σ|c|) per measured ancilla pair.
    pub(crate) fn gamma_scale(&self, n: usize) -> f64 {
        self.readout.scale().powi(self.ancilla_count(n) as i32)
    }

    pub(crate) fn check_inputs(&self, inputs: &[DensityOp]) -> Result<()> {
        if inputs.is_empty() {
            return Err(Error::Dimension("need at least one input pair".into()));
        }
        if let Some(bad) = inputs.iter().find(|r| r.qubits() != 2) {
            return Err(Error::Dimension(format!("input pairs must have 2 qubits, got {}", bad.qubits())));
        }
        let n = inputs.len();
        let widest = match self.mode {
            AncillaMode::Fresh => (2 * n).max(4),
            AncillaMode::Reuse => 2 + 2 * n,
        };
        if widest > MAX_QUBITS {
            return Err(Error::TooLarge { qubits: widest, max: MAX_QUBITS });
        }
        if let Some(d) = &self.downstream {
            kernel::check_targets(2 * n, &d.targets, d.channel.arity())?;
        }
        Ok(())
    }

    pub(crate) fn gadget_circuit(&self, qubits: usize, term: StabilizerTerm, wires: GadgetWires) -> Result<Circuit> {
        let mut c = Circuit::new(qubits);
        push_gadget(&mut c, &self.set, term, &self.noise, wires)?;
        Ok(c)
    }

    fn averaged_gadget(&self, state: &ComplexMatrix, wires: GadgetWires) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(state.dim());
        for (term, w) in gadget_terms(&self.set, self.terms) {
            let c = self.gadget_circuit(state.qubits(), term, wires)?;
            acc.add_scaled(&c.run(state), w)?;
        }
        Ok(acc)
    }

    pub(crate) fn readout_run(&self, state: &ComplexMatrix, anc: [usize; 2]) -> Result<ComplexMatrix> {
        let mut c = Circuit::new(state.qubits());
        push_readout(&mut c, &self.noise, anc)?;
        Ok(c.run(state))
    }

    /// Σ_w c_w Tr_anc[(B_w ⊗ I) σ] with the ancilla on qubits (0, 1).
    pub(crate) fn contract_parity(&self, sigma: &ComplexMatrix) -> ComplexMatrix {
        let keep: Vec<usize> = (2..sigma.qubits()).collect();
        let mut out = ComplexMatrix::zeros(1 << keep.len());
        for (c, b) in &self.readout.branches {
            let m = kernel::partial_trace(&kernel::left(sigma, b, &[0, 1]), &keep);
            out.add_scaled(&m, *c).unwrap();
        }
        out
    }

    fn apply_downstream(&self, m: ComplexMatrix) -> ComplexMatrix {
        match &self.downstream {
            Some(d) => d.channel.act(&m, &d.targets),
            None => m,
        }
    }

    /// The virtual target operator whose trace is b and whose O-expectation is a.
    pub fn virtual_operator(&self, inputs: &[DensityOp]) -> Result<DensityOp> {
        self.check_inputs(inputs)?;
        let m = match self.mode {
            AncillaMode::Fresh => {
                let mut parts = Vec::with_capacity(inputs.len());
                for rho in inputs {
                    let start = self.ancilla.matrix().kron(rho.matrix())?;
                    let sigma = self.averaged_gadget(&start, GadgetWires { anc: [0, 1], tgt: [2, 3] })?;
                    let sigma = self.readout_run(&sigma, [0, 1])?;
                    parts.push(DensityOp::from_parts(self.contract_parity(&sigma), Kind::Virtual));
                }
                tensor_all(&parts)?.into_matrix()
            }
            AncillaMode::Reuse => {
                let mut all = vec![self.ancilla.clone()];
                all.extend(inputs.iter().cloned());
                let mut sigma = tensor_all(&all)?.into_matrix();
                for l in 0..inputs.len() {
                    let wires = GadgetWires { anc: [0, 1], tgt: [2 + 2 * l, 3 + 2 * l] };
                    sigma = self.averaged_gadget(&sigma, wires)?;
                }
                let sigma = self.readout_run(&sigma, [0, 1])?;
                self.contract_parity(&sigma)
            }
        };
        Ok(DensityOp::from_parts(self.apply_downstream(m), Kind::Virtual))
    }

    pub fn exact(&self, inputs: &[DensityOp], observable: &ComplexMatrix) -> Result<VirtualEstimate> {
        check_observable(observable, inputs.len())?;
        let m = self.virtual_operator(inputs)?;
        let a = real(observable.trace_product(m.matrix())?)?;
        let b = real(m.matrix().trace())?;
        if b.abs() < DEGENERATE_TRACE {
            return Err(Error::DegenerateDenominator(b));
        }
        Ok(VirtualEstimate {
            a,
            b,
            ratio: a / b,
            gamma: self.gamma_scale(inputs.len()) / b.abs(),
            n_shots: 0,
            stderr_ratio: 0.0,
        })
    }
}

pub(crate) fn check_observable(obs: &ComplexMatrix, n: usize) -> Result<()> {
    if obs.qubits() != 2 * n {
        return Err(Error::Dimension(format!("observable on {} qubits for {n} pairs", obs.qubits())));
    }
    let h = obs.hermiticity_defect();
    if h > HERMITIAN_TOL {
        return Err(Error::NotHermitian(h));
    }
    Ok(())
}

fn real(z: num_complex::Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// Exact estimator with a Werner ancilla of infidelity `ancilla_eps`.
pub fn exact_virtual(
    inputs: &[DensityOp],
    ancilla_eps: f64,
    noise: &NoiseParams,
    observable: &ComplexMatrix,
    mode: AncillaMode,
) -> Result<VirtualEstimate> {
    Protocol::with_werner_ancilla(ancilla_eps, *noise, mode)?.exact(inputs, observable)
}
