//! Shot-by-shot sampling of the virtual estimator.
//!
//! Each shot draws (i, j) uniformly per pair, a parity branch per ancilla, then
//! one joint outcome (ancilla parity, observable eigenvalue) from the exact
//! distribution of that circuit. Shots are cut into fixed shards, each with its
//! own derived seed, so results do not depend on the worker count.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::circuit::GadgetWires;
use super::engine::{check_observable, AncillaMode, Protocol, VirtualEstimate};
use super::stabilizer::StabilizerTerm;
use crate::error::{Error, Result};
use crate::qcore::{kernel, tensor_all, ComplexMatrix, DensityOp, Kind};
use crate::rng;

pub const SHARD_SHOTS: u64 = 4096;

/// Spectral projectors of an observable, eigenvalues merged within 1e-9.
pub(crate) fn spectral_projectors(obs: &ComplexMatrix) -> Vec<(f64, ComplexMatrix)> {
    let (vals, vecs) = obs.hermitian_eigen();
    let mut out: Vec<(f64, ComplexMatrix)> = Vec::new();
    for (v, vec) in vals.iter().zip(&vecs) {
        let proj = ComplexMatrix::outer(vec).unwrap();
        match out.last_mut() {
            Some((last, p)) if (v - *last).abs() <= 1e-9 => p.add_scaled(&proj, 1.0).unwrap(),
            _ => out.push((*v, proj)),
        }
    }
    out
}

#[derive(Clone, Copy, Default)]
struct Acc {
    n: u64,
    a: f64,
    b: f64,
    aa: f64,
    bb: f64,
    ab: f64,
}

impl Acc {
    fn push(&mut self, a: f64, b: f64) {
        self.n += 1;
        self.a += a;
        self.b += b;
        self.aa += a * a;
        self.bb += b * b;
        self.ab += a * b;
    }

    fn merge(&mut self, o: &Acc) {
        self.n += o.n;
        self.a += o.a;
        self.b += o.b;
        self.aa += o.aa;
        self.bb += o.bb;
        self.ab += o.ab;
    }
}

struct Sampler<'a> {
    protocol: &'a Protocol,
    inputs: &'a [DensityOp],
    spectrum: Vec<(f64, ComplexMatrix)>,
    /// Fresh mode: per pair, per term index, (Tr_anc σ, per-branch parity contraction).
    fresh: Vec<Vec<(ComplexMatrix, Vec<ComplexMatrix>)>>,
    branch_cdf: Vec<f64>,
    /// Outcome distributions keyed by (terms, branches). Shared by all shards;
    /// entries depend only on the key, so sharing cannot change results.
    cache: RwLock<HashMap<Key, Arc<Vec<f64>>>>,
}

type Key = (Vec<usize>, Vec<usize>);

impl<'a> Sampler<'a> {
    fn new(protocol: &'a Protocol, inputs: &'a [DensityOp], obs: &ComplexMatrix) -> Result<Self> {
        let mut fresh = Vec::new();
        if protocol.mode == AncillaMode::Fresh {
            for rho in inputs {
                let start = protocol.ancilla.matrix().kron(rho.matrix())?;
                let mut per_term = Vec::with_capacity(16);
                for idx in 0..16 {
                    let term = StabilizerTerm::from_index(idx);
                    let c = protocol.gadget_circuit(4, term, GadgetWires { anc: [0, 1], tgt: [2, 3] })?;
                    let sigma = protocol.readout_run(&c.run(&start), [0, 1])?;
                    per_term.push(Self::marginals(protocol, &sigma));
                }
                fresh.push(per_term);
            }
        }
        let scale = protocol.readout.scale();
        let mut acc = 0.0;
        let branch_cdf = protocol
            .readout
            .branches()
            .iter()
            .map(|(c, _)| {
                acc += c.abs() / scale;
                acc
            })
            .collect();
        Ok(Self { protocol, inputs, spectrum: spectral_projectors(obs), fresh, branch_cdf, cache: RwLock::default() })
    }

    fn marginals(protocol: &Protocol, sigma: &ComplexMatrix) -> (ComplexMatrix, Vec<ComplexMatrix>) {
        let keep: Vec<usize> = (2..sigma.qubits()).collect();
        let t0 = kernel::partial_trace(sigma, &keep);
        let tx = protocol
            .readout
            .branches()
            .iter()
            .map(|(_, b)| kernel::partial_trace(&kernel::left(sigma, b, &[0, 1]), &keep))
            .collect();
        (t0, tx)
    }

    /// Cumulative distribution over [(+, o_0), (+, o_1), ..., (-, o_0), ...].
    fn distribution(&self, terms: &[usize], branches: &[usize]) -> Result<Vec<f64>> {
        let (t0, tx) = match self.protocol.mode {
            AncillaMode::Fresh => {
                let zeros: Vec<DensityOp> = terms
                    .iter()
                    .enumerate()
                    .map(|(l, &t)| DensityOp::from_parts(self.fresh[l][t].0.clone(), Kind::Virtual))
                    .collect();
                let xs: Vec<DensityOp> = terms
                    .iter()
                    .enumerate()
                    .map(|(l, &t)| DensityOp::from_parts(self.fresh[l][t].1[branches[l]].clone(), Kind::Virtual))
                    .collect();
                (tensor_all(&zeros)?.into_matrix(), tensor_all(&xs)?.into_matrix())
            }
            AncillaMode::Reuse => {
                let mut all = vec![self.protocol.ancilla.clone()];
                all.extend(self.inputs.iter().cloned());
                let mut sigma = tensor_all(&all)?.into_matrix();
                for (l, &t) in terms.iter().enumerate() {
                    let wires = GadgetWires { anc: [0, 1], tgt: [2 + 2 * l, 3 + 2 * l] };
                    let c = self.protocol.gadget_circuit(sigma.qubits(), StabilizerTerm::from_index(t), wires)?;
                    sigma = c.run(&sigma);
                }
                let sigma = self.protocol.readout_run(&sigma, [0, 1])?;
                let (t0, tx) = Self::marginals(self.protocol, &sigma);
                (t0, tx[branches[0]].clone())
            }
        };
        let (t0, tx) = match &self.protocol.downstream {
            Some(d) => (d.channel.act(&t0, &d.targets), d.channel.act(&tx, &d.targets)),
            None => (t0, tx),
        };
        let mut probs = Vec::with_capacity(2 * self.spectrum.len());
        for sign in [1.0, -1.0] {
            for (_, proj) in &self.spectrum {
                let p0 = proj.trace_product(&t0)?.re;
                let px = proj.trace_product(&tx)?.re;
                probs.push(((p0 + sign * px) / 2.0).max(0.0));
            }
        }
        let total: f64 = probs.iter().sum();
        let mut acc = 0.0;
        Ok(probs
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect())
    }

    fn cached(&self, key: Key) -> Result<Arc<Vec<f64>>> {
        if let Some(d) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(d.clone());
        }
        let d = Arc::new(self.distribution(&key.0, &key.1)?);
        self.cache.write().expect("cache lock").insert(key, d.clone());
        Ok(d)
    }

    fn pick(cdf: &[f64], u: f64) -> usize {
        cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
    }

    fn run_shard(&self, seed: u64, shard: u64, shots: u64) -> Result<Acc> {
        let mut rng: ChaCha8Rng = rng::stream(seed, "mc-shard", shard);
        let n = self.inputs.len();
        let n_anc = self.protocol.ancilla_count(n);
        let branches = self.protocol.readout.branches();
        let scale = self.protocol.readout.scale();
        let mut acc = Acc::default();
        let k = self.spectrum.len();
        for _ in 0..shots {
            let mut g = 1.0;
            let mut terms = Vec::with_capacity(n);
            for _ in 0..n {
                let i = rng.gen_range(0..4);
                let j = rng.gen_range(0..4);
                let t = StabilizerTerm::from_sampled(&self.protocol.set, i, j)?;
                g *= t.sign(&self.protocol.set);
                terms.push(t.index());
            }
            let mut picks = Vec::with_capacity(n_anc);
            for _ in 0..n_anc {
                let w = if branches.len() == 1 { 0 } else { Self::pick(&self.branch_cdf, rng.gen::<f64>()) };
                g *= scale * branches[w].0.signum();
                picks.push(w);
            }
            let dist = self.cached((terms, picks))?;
            let outcome = Self::pick(&dist, rng.gen::<f64>());
            let parity = if outcome < k { 1.0 } else { -1.0 };
            let o = self.spectrum[outcome % k].0;
            acc.push(g * parity * o, g * parity);
        }
        Ok(acc)
    }
}

impl Protocol {
    pub fn sample(&self, inputs: &[DensityOp], observable: &ComplexMatrix, shots: u64, seed: u64) -> Result<VirtualEstimate> {
        if shots == 0 {
            return Err(Error::Parameter { name: "shots", value: 0.0, range: "[1, inf)" });
        }
        check_observable(observable, inputs.len())?;
        self.check_inputs(inputs)?;
        let sampler = Sampler::new(self, inputs, observable)?;
        let shards = shots.div_ceil(SHARD_SHOTS);
        let parts: Vec<Result<Acc>> = (0..shards)
            .into_par_iter()
            .map(|s| sampler.run_shard(seed, s, SHARD_SHOTS.min(shots - s * SHARD_SHOTS)))
            .collect();
        let mut acc = Acc::default();
        for p in parts {
            acc.merge(&p?);
        }
        summarize(&acc, self.gamma_scale(inputs.len()))
    }
}

fn summarize(acc: &Acc, scale: f64) -> Result<VirtualEstimate> {
    let n = acc.n as f64;
    let (ma, mb) = (acc.a / n, acc.b / n);
    let dof = (n - 1.0).max(1.0);
    let var_a = ((acc.aa - n * ma * ma) / dof).max(0.0);
    let var_b = ((acc.bb - n * mb * mb) / dof).max(0.0);
    let cov = (acc.ab - n * ma * mb) / dof;
    let se_b = (var_b / n).sqrt();
    if mb.abs() <= 3.0 * se_b || mb == 0.0 {
        return Err(Error::UnreliableDenominator { b: mb, stderr: se_b });
    }
    let r = ma / mb;
    let var_r = ((var_a - 2.0 * r * cov + r * r * var_b) / (n * mb * mb)).max(0.0);
    Ok(VirtualEstimate { a: ma, b: mb, ratio: r, gamma: scale / mb.abs(), n_shots: acc.n, stderr_ratio: var_r.sqrt() })
}

/// Monte Carlo estimator with a Werner ancilla of infidelity `ancilla_eps`.
pub fn mc_virtual(
    inputs: &[DensityOp],
    ancilla_eps: f64,
    noise: &crate::noise::NoiseParams,
    observable: &ComplexMatrix,
    mode: AncillaMode,
    shots: u64,
    seed: u64,
) -> Result<VirtualEstimate> {
    Protocol::with_werner_ancilla(ancilla_eps, *noise, mode)?.sample(inputs, observable, shots, seed)
}
