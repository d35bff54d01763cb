//! Closed-form purified fidelity for one Werner pair with a Werner ancilla of
//! the same infidelity, treating the noisy gadget as ideal gadget followed by
//! 𝓔₂ on each party.

use serde::Serialize;

use crate::error::{check_range, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalyticFidelity {
    pub fidelity: f64,
    /// 1 − 3p₁/8 − 8p₂ε/15
    pub leading_order: f64,
}

impl AnalyticFidelity {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

pub fn analytic_fidelity(p1: f64, p2: f64, eps: f64) -> Result<AnalyticFidelity> {
    check_range("p1", p1, 0.0, 0.75, "[0, 0.75]")?;
    check_range("p2", p2, 0.0, 15.0 / 16.0, "[0, 15/16]")?;
    check_range("eps", eps, 0.0, 1.0, "[0, 1]")?;
    let s1 = 1.0 - 4.0 * p1 / 3.0;
    let s2 = 1.0 - 16.0 * p2 / 15.0;
    let w = 1.0 - 4.0 * eps / 3.0;
    let num = (9.0 / 16.0) * (1.0 - s1 * s1) * w + (1.0 - s2 * s2) * eps;
    let den = 1.0 - eps - 0.75 * (1.0 - s2 * s2) * w;
    if den <= 0.0 {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok(AnalyticFidelity {
        fidelity: 1.0 - 0.25 * num / den,
        leading_order: 1.0 - 3.0 * p1 / 8.0 - 8.0 * p2 * eps / 15.0,
    })
}
