//! Experiment configuration: one JSON document per run.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::vpure::{AncillaMode, Shots};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig2a,
    Fig2b,
    Fig2c,
    SmHadamard,
    SmAnalytic,
    SmReuse,
    Sweep,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig2a => "fig2a",
            Experiment::Fig2b => "fig2b",
            Experiment::Fig2c => "fig2c",
            Experiment::SmHadamard => "sm_hadamard",
            Experiment::SmAnalytic => "sm_analytic",
            Experiment::SmReuse => "sm_reuse",
            Experiment::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSettings {
    pub eps_start: f64,
    pub points: usize,
    pub half_width: f64,
}

impl Default for DriftSettings {
    fn default() -> Self {
        Self { eps_start: 0.1, points: 10_000, half_width: 0.05 }
    }
}

fn default_eps() -> Vec<f64> {
    vec![0.1]
}
fn default_n() -> Vec<u32> {
    vec![1, 2, 4, 8, 16, 32]
}
fn default_p2() -> Vec<f64> {
    (0..8).map(|i| 0.03 * i as f64 / 7.0).collect()
}
fn default_eps_fin() -> Vec<f64> {
    vec![0.05, 0.1, 0.15, 0.2]
}
fn default_eps_assumed() -> f64 {
    0.1
}
fn default_rounds() -> usize {
    15
}
fn default_exact_max_n() -> u32 {
    4
}
fn default_shots() -> Shots {
    Shots::Exact
}
fn default_mode() -> AncillaMode {
    AncillaMode::Fresh
}

/// Every field except `experiment` has a default; unknown fields are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "NoiseParams::reference")]
    pub noise: NoiseParams,
    /// Input Werner infidelities.
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    /// Ancilla infidelity; the input infidelity of each point when absent.
    #[serde(default)]
    pub ancilla_eps: Option<f64>,
    #[serde(default = "default_n")]
    pub n: Vec<u32>,
    #[serde(default = "default_p2")]
    pub p2: Vec<f64>,
    #[serde(default = "default_eps_fin")]
    pub eps_fin: Vec<f64>,
    #[serde(default)]
    pub drift: DriftSettings,
    #[serde(default = "default_eps_assumed")]
    pub eps_assumed: f64,
    /// Double-selection rounds.
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// Largest n simulated directly; larger n use the n = 1 extrapolation.
    #[serde(default = "default_exact_max_n")]
    pub exact_max_n: u32,
    #[serde(default = "default_mode")]
    pub mode: AncillaMode,
    #[serde(default = "default_shots")]
    pub shots: Shots,
    #[serde(default)]
    pub seed: Option<u64>,
    /// File name inside the output directory; `<experiment>.csv` when absent.
    #[serde(default)]
    pub output: Option<String>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_grid(name: &str, xs: &[f64], lo: f64, hi: f64) -> Result<()> {
    if xs.is_empty() {
        return Err(config_err(format!("field `{name}`: grid is empty")));
    }
    if let Some(x) = xs.iter().find(|x| !(x.is_finite() && **x >= lo && **x <= hi)) {
        return Err(config_err(format!("field `{name}`: value {x} outside [{lo}, {hi}]")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        serde_json::from_value(serde_json::json!({ "experiment": experiment })).expect("defaults deserialize")
    }

    /// Parses and validates; parse errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.noise.validate().map_err(|e| config_err(format!("field `noise`: {e}")))?;
        check_grid("eps", &self.eps, 0.0, 0.74)?;
        if let Some(a) = self.ancilla_eps {
            check_grid("ancilla_eps", &[a], 0.0, 0.74)?;
        }
        if self.n.is_empty() {
            return Err(config_err("field `n`: grid is empty"));
        }
        if self.n.contains(&0) {
            return Err(config_err("field `n`: pair counts start at 1"));
        }
        if self.exact_max_n > 5 {
            return Err(config_err(format!("field `exact_max_n`: {} exceeds the 12-qubit cap (max 5)", self.exact_max_n)));
        }
        check_grid("p2", &self.p2, 0.0, 15.0 / 16.0)?;
        check_grid("eps_fin", &self.eps_fin, 0.0, 1.0)?;
        check_grid("drift.eps_start", &[self.drift.eps_start], 0.0, 1.0)?;
        check_grid("drift.half_width", &[self.drift.half_width], 0.0, 0.5)?;
        if self.drift.points == 0 {
            return Err(config_err("field `drift.points`: must be positive"));
        }
        check_grid("eps_assumed", &[self.eps_assumed], 0.0, 0.74)?;
        if let Shots::Finite(_) = self.shots {
            if self.seed.is_none() {
                return Err(config_err("field `seed`: required when `shots` is finite"));
            }
            if self.experiment != Experiment::Sweep {
                return Err(config_err(format!(
                    "field `shots`: {} is exact-only, finite shots apply to `sweep`",
                    self.experiment.name()
                )));
            }
        }
        if self.experiment == Experiment::Sweep {
            if let Some(&n) = self.n.iter().find(|&&n| n > 5) {
                return Err(config_err(format!("field `n`: sweep samples at most 5 pairs, got {n}")));
            }
        }
        if let Some(o) = &self.output {
            if o.is_empty() || o.contains('/') || o.contains('\\') {
                return Err(config_err("field `output`: must be a plain file name"));
            }
        }
        Ok(())
    }

    pub fn output_name(&self) -> String {
        self.output.clone().unwrap_or_else(|| format!("{}.csv", self.experiment.name()))
    }

    pub fn seed_or_zero(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// SHA-256 of the canonical JSON form, defaults included.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
