//! Closed-form sampling costs and yields.

use crate::error::{Error, Result};

fn ancilla_factor(eps: f64) -> Result<f64> {
    crate::error::check_range("eps_anc", eps, 0.0, 1.0 - f64::EPSILON, "[0, 1)")?;
    let f = (1.0 - 4.0 * eps / 3.0).abs();
    if f < 1e-14 {
        return Err(Error::DegenerateDenominator(f));
    }
    Ok(f)
}

fn fidelity_product(f_noisy: &[f64]) -> Result<f64> {
    if f_noisy.is_empty() {
        return Err(Error::Dimension("empty fidelity list".into()));
    }
    let mut p = 1.0;
    for &f in f_noisy {
        if f == 0.0 {
            return Err(Error::DegenerateDenominator(0.0));
        }
        crate::error::check_range("F", f, f64::MIN_POSITIVE, 1.0, "(0, 1]")?;
        p *= f;
    }
    Ok(p)
}

/// ∏ (1 - 4ε_ℓ/3)^-1 F_ℓ^-1 for one Werner ancilla per pair.
pub fn gamma_fresh(eps_anc: &[f64], f_noisy: &[f64]) -> Result<f64> {
    if eps_anc.len() != f_noisy.len() {
        return Err(Error::Dimension(format!("{} ancilla rates for {} pairs", eps_anc.len(), f_noisy.len())));
    }
    let mut anc = 1.0;
    for &e in eps_anc {
        anc *= ancilla_factor(e)?;
    }
    Ok(1.0 / (anc * fidelity_product(f_noisy)?))
}

/// (1 - 4ε/3)^-1 ∏ F_ℓ^-1 for a single reused ancilla.
pub fn gamma_reuse(eps_anc: f64, f_noisy: &[f64]) -> Result<f64> {
    Ok(1.0 / (ancilla_factor(eps_anc)? * fidelity_product(f_noisy)?))
}

/// ∏ 1/K_i · ∏ 1/γ_ℓ². K may be fractional when one ancilla is shared by several pairs.
pub fn virtual_yield(gammas: &[f64], k_per_round: &[f64]) -> Result<f64> {
    if gammas.is_empty() || k_per_round.is_empty() {
        return Err(Error::Dimension("yield needs nonempty gamma and K lists".into()));
    }
    let k: f64 = k_per_round.iter().product();
    let g: f64 = gammas.iter().map(|g| g * g).product();
    Ok(1.0 / (k * g))
}

/// Optimal circuit-knitting overhead for n Bell pairs, 2^(n+1) - 1.
pub fn knitting_bound(n: u32) -> f64 {
    2f64.powi(n as i32 + 1) - 1.0
}

/// [γ²]^(1/n)
pub fn per_bell_overhead(gamma: f64, n: u32) -> f64 {
    (gamma * gamma).powf(1.0 / n as f64)
}
