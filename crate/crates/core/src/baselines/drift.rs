//! Source drift: the Werner infidelity walks linearly from `eps_start` to
//! `eps_fin` over N shots with uniform jitter, and both methods see only the
//! shot-averaged state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pec::{pec_apply_noisy, pec_inverse_werner};
use crate::error::{check_range, Error, Result};
use crate::noise::NoiseParams;
use crate::qcore::{bell_fidelity, bell_projector, ComplexMatrix, DensityOp, Kind};
use crate::rng;
use crate::states::werner;
use crate::vpure::{exact_virtual, AncillaMode};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSchedule {
    pub eps_start: f64,
    pub eps_fin: f64,
    pub n: usize,
    pub half_width: f64,
    pub seed: u64,
}

impl DriftSchedule {
    pub fn new(eps_start: f64, eps_fin: f64, n: usize, half_width: f64, seed: u64) -> Result<Self> {
        let s = Self { eps_start, eps_fin, n, half_width, seed };
        s.validate()?;
        Ok(s)
    }

    /// Start at 0.1, 10⁴ points, jitter ±0.05.
    pub fn standard(eps_fin: f64, seed: u64) -> Result<Self> {
        Self::new(0.1, eps_fin, 10_000, 0.05, seed)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("eps_start", self.eps_start, 0.0, 1.0, "[0, 1]")?;
        check_range("eps_fin", self.eps_fin, 0.0, 1.0, "[0, 1]")?;
        check_range("half_width", self.half_width, 0.0, 0.5, "[0, 0.5]")?;
        if self.n == 0 {
            return Err(Error::Parameter { name: "n", value: 0.0, range: ">= 1" });
        }
        Ok(())
    }

    /// ε_p for p = 1..N, clipped to [0, 1].
    pub fn points(&self) -> Vec<f64> {
        let mut r = rng::stream(self.seed, "drift", 0);
        let w = self.half_width;
        (1..=self.n)
            .map(|p| {
                let jitter = if w > 0.0 { r.gen_range(-w..=w) } else { 0.0 };
                let e = self.eps_start + (self.eps_fin - self.eps_start) * p as f64 / self.n as f64 + jitter;
                e.clamp(0.0, 1.0)
            })
            .collect()
    }

    pub fn mean_eps(&self) -> f64 {
        let pts = self.points();
        pts.iter().sum::<f64>() / pts.len() as f64
    }

    /// (1/N) Σ_p werner(ε_p), summed explicitly.
    pub fn averaged_state(&self) -> Result<DensityOp> {
        let pts = self.points();
        let mut acc = ComplexMatrix::zeros(4);
        for e in &pts {
            acc.add_scaled(werner(*e)?.matrix(), 1.0 / pts.len() as f64)?;
        }
        Ok(DensityOp::from_parts(acc, Kind::Physical))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftOutcome {
    pub eps_mean: f64,
    pub vpure_infidelity: f64,
    pub pec_infidelity: f64,
}

/// The ancilla pair comes from the same drifting source, so it is the
/// averaged Werner state too. PEC assumes the stale `eps_assumed`.
pub fn drift_experiment(schedule: &DriftSchedule, noise: &NoiseParams, eps_assumed: f64) -> Result<DriftOutcome> {
    schedule.validate()?;
    noise.validate()?;
    let rho = schedule.averaged_state()?;
    let eps_mean = schedule.mean_eps();
    let v = exact_virtual(std::slice::from_ref(&rho), eps_mean, noise, &bell_projector(), AncillaMode::Fresh)?;
    let corrected = pec_apply_noisy(&rho, &pec_inverse_werner(eps_assumed)?, noise.p1)?;
    let f_pec = bell_fidelity(&corrected)?;
    Ok(DriftOutcome { eps_mean, vpure_infidelity: 1.0 - v.ratio, pec_infidelity: (1.0 - f_pec).abs() })
}
