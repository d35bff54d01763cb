use crate::error::{check_range, Error, Result};

/// Extends n = 1 reuse-mode data to n pairs: numerator and denominator are each
/// scaled as (1 - 2p_mes)^(2-2n) (1 - 4ε/3)^(1-n) · dataⁿ. Returns (fidelity, γ).
pub fn reuse_extrapolate(n1_num: f64, n1_den: f64, n: u32, eps_anc: f64, p_mes: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Parameter { name: "n", value: 0.0, range: "[1, inf)" });
    }
    check_range("eps_anc", eps_anc, 0.0, 1.0, "[0, 1]")?;
    check_range("p_mes", p_mes, 0.0, 1.0, "[0, 1]")?;
    let k = 1 - n as i32;
    let c = (1.0 - 2.0 * p_mes).powi(2 * k) * (1.0 - 4.0 * eps_anc / 3.0).powi(k);
    let num = c * n1_num.powi(n as i32);
    let den = c * n1_den.powi(n as i32);
    if !den.is_finite() || den.abs() < 1e-14 {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok((num / den, 1.0 / den.abs()))
}
