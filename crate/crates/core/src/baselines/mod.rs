//! Conventional baselines: recurrence and double-selection purification,
//! Pauli PEC and the drift comparison.

mod drift;
mod pec;
mod recurrence;

pub use drift::{drift_experiment, DriftOutcome, DriftSchedule};
pub use pec::{
    pec_apply_exact, pec_apply_noisy, pec_estimate_eps, pec_inverse_bell_diagonal, pec_inverse_werner,
    remote_cnot_parity, QuasiProbDecomp,
};
pub use recurrence::{
    double_selection_iterate, double_selection_round, recurrence_round, RoundRecord, YieldLedger, MIN_SUCCESS,
};
