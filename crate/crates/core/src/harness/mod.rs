//! Experiment configs, CSV emission, closed-form evaluators and the selftest.

mod analytic;
mod config;
mod experiments;
mod selftest;

pub use analytic::{analytic_fidelity, AnalyticFidelity};
pub use config::{DriftSettings, Experiment, ExperimentConfig};
pub use experiments::{
    hadamard_spec, render_csv, run, run_to_dir, single_pair_infidelity, ControlNoise, Table, VERSION,
};
pub use selftest::{render_report, selftest, Check, SelftestOptions};
