//! Release gate: invariants from every module plus the headline numbers.

use rand::Rng;

use super::analytic::analytic_fidelity;
use super::config::{Experiment, ExperimentConfig};
use super::experiments::{hadamard_spec, render_csv, run, single_pair_infidelity, ControlNoise};
use crate::baselines::{
    double_selection_iterate, drift_experiment, pec_apply_exact, pec_estimate_eps, pec_inverse_bell_diagonal,
    pec_inverse_werner, DriftSchedule, QuasiProbDecomp,
};
use crate::error::Result;
use crate::noise::{depolarize2, NoiseParams};
use crate::qcore::{
    apply_channel, bell_projector, bell_projector_product, expectation_pauli, PauliString,
};
use crate::rng;
use crate::states::{bell, bell_diagonal, plus_plus, werner, BellDiagonalParams};
use crate::vpure::{
    exact_virtual, gamma_fresh, gamma_reuse, hadamard_test, knitting_bound, knitting_variant, mc_virtual,
    per_bell_overhead, reuse_extrapolate, AncillaMode, Shots, StabilizerSet,
};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelftestOptions {
    /// Added to q_II of every PEC decomposition before checking.
    pub pec_q_ii_shift: f64,
    /// Use +Y⊗Y in place of −Y⊗Y in the stabilizer-sum check.
    pub flip_yy_sign: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub property: String,
    pub observed: String,
    pub expected: String,
    pub passed: bool,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, module: &'static str, property: &str, observed: String, expected: String, passed: bool) {
        self.checks.push(Check { module, property: property.into(), observed, expected, passed });
    }

    fn close(&mut self, module: &'static str, property: &str, observed: f64, expected: f64, tol: f64) {
        let ok = (observed - expected).abs() <= tol;
        self.push(module, property, format!("{observed:.12e}"), format!("{expected:.12e} ± {tol:.1e}"), ok);
    }

    fn max_err(&mut self, module: &'static str, property: &str, err: f64, tol: f64) {
        self.push(module, property, format!("{err:.3e}"), format!("≤ {tol:.1e}"), err <= tol);
    }

    fn fallible(&mut self, module: &'static str, property: &str, f: impl FnOnce(&mut Suite) -> Result<()>) {
        if let Err(e) = f(self) {
            self.push(module, property, format!("error: {e}"), "no error".into(), false);
        }
    }
}

fn pauli(s: &str) -> PauliString {
    s.parse().expect("static Pauli string")
}

fn qcore_checks(s: &mut Suite) {
    s.fallible("qcore", "stabilizer expectations", |s| {
        s.close("qcore", "<Bell|XX|Bell>", expectation_pauli(&bell(), &pauli("XX"))?, 1.0, 1e-12);
        s.close("qcore", "<Bell|-YY|Bell>", expectation_pauli(&bell(), &pauli("-YY"))?, 1.0, 1e-12);
        s.close("qcore", "Tr[P_Bell werner(0.1)]", werner(0.1)?.matrix().trace_product(&bell_projector())?.re, 0.9, 1e-12);
        Ok(())
    });
    s.fallible("noise", "Pauli mixture equals its Kraus form", |s| {
        let ch = depolarize2(0.07)?;
        let k = ch.to_kraus();
        let rho = bell_diagonal(&BellDiagonalParams::new(0.1, 0.02, 0.05)?)?;
        let a = apply_channel(&rho, &ch, &[0, 1])?;
        let b = apply_channel(&rho, &k, &[0, 1])?;
        s.max_err("noise", "Pauli mixture equals its Kraus form", a.matrix().max_abs_diff(b.matrix()), 1e-12);
        Ok(())
    });
}

fn vpure_checks(s: &mut Suite, opts: &SelftestOptions) {
    s.fallible("vpure", "stabilizer-sum identity", |s| {
        let yy = if opts.flip_yy_sign { "YY" } else { "-YY" };
        let set = StabilizerSet::from_elements([pauli("II"), pauli("XX"), pauli(yy), pauli("ZZ")])?;
        s.max_err("vpure", "(1/4) Σ S_i = P_Bell", set.projector().max_abs_diff(&bell_projector()), 1e-12);
        Ok(())
    });
    s.fallible("vpure", "noiseless exactness", |s| {
        let mut r = rng::stream(1, "selftest-noiseless", 0);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let p = BellDiagonalParams::new(r.gen_range(0.0..0.15), r.gen_range(0.0..0.15), r.gen_range(0.0..0.15))?;
            let v = exact_virtual(&[bell_diagonal(&p)?], r.gen_range(0.0..0.4), &NoiseParams::zero(), &bell_projector(), AncillaMode::Fresh)?;
            worst = worst.max((v.ratio - 1.0).abs());
        }
        s.max_err("vpure", "noiseless ratio = 1 (10 Bell-diagonal inputs)", worst, 1e-10);
        Ok(())
    });
    s.fallible("vpure", "reference-point infidelity", |s| {
        let inf = single_pair_infidelity(&NoiseParams::reference(), 0.1)?;
        s.close("vpure", "infidelity at (0.001, 0.01, 0.03, ε=0.1)", inf, 3.0 * 0.001 / 8.0 + 8.0 * 0.01 * 0.1 / 15.0, 2.5e-4);
        Ok(())
    });
    s.fallible("vpure", "p_mes cancels in the ratio", |s| {
        let base = single_pair_infidelity(&NoiseParams::reference().with_p_mes(0.0), 0.1)?;
        let mut worst: f64 = 0.0;
        for p in [0.03, 0.1] {
            worst = worst.max((single_pair_infidelity(&NoiseParams::reference().with_p_mes(p), 0.1)? - base).abs());
        }
        s.max_err("vpure", "ratio independent of p_mes", worst, 1e-10);
        Ok(())
    });
    s.fallible("vpure", "γ closed forms", |s| {
        let mut worst: f64 = 0.0;
        let eps = 0.1;
        for n in 1..=3usize {
            let inputs = vec![werner(eps)?; n];
            let obs = bell_projector_product(n)?;
            let fresh = exact_virtual(&inputs, eps, &NoiseParams::zero(), &obs, AncillaMode::Fresh)?;
            let reuse = exact_virtual(&inputs, eps, &NoiseParams::zero(), &obs, AncillaMode::Reuse)?;
            let f = vec![1.0 - eps; n];
            worst = worst.max((fresh.gamma - gamma_fresh(&vec![eps; n], &f)?).abs());
            worst = worst.max((reuse.gamma - gamma_reuse(eps, &f)?).abs());
        }
        s.max_err("vpure", "exact γ = closed form, n = 1..3", worst, 1e-12);
        Ok(())
    });
    s.fallible("vpure", "knitting", |s| {
        let mut worst: f64 = 0.0;
        for n in 1..=3usize {
            let inputs = vec![plus_plus(); n];
            let v = knitting_variant(&inputs, &NoiseParams::zero(), &bell_projector_product(n)?, Shots::Exact, 0)?;
            worst = worst.max((v.gamma - 2f64.powi(n as i32 + 1)).abs());
        }
        s.max_err("vpure", "knitting γ = 2^(n+1) at |++⟩ inputs", worst, 1e-10);
        let one = exact_virtual(&[werner(0.1)?], 0.1, &NoiseParams::reference(), &bell_projector(), AncillaMode::Fresh)?;
        let ratio = per_bell_overhead(one.gamma.powi(8), 8) / per_bell_overhead(knitting_bound(8), 8);
        s.push("vpure", "per-Bell overhead / knitting at n = 8", format!("{ratio:.4}"), "in [0.35, 0.65]".into(), (0.35..=0.65).contains(&ratio));
        Ok(())
    });
    s.fallible("vpure", "reuse extrapolation", |s| {
        let noise = NoiseParams::reference();
        let one = exact_virtual(&[werner(0.1)?], 0.1, &noise, &bell_projector(), AncillaMode::Reuse)?;
        let mut worst: f64 = 0.0;
        for n in 2..=3u32 {
            let d = exact_virtual(&vec![werner(0.1)?; n as usize], 0.1, &noise, &bell_projector_product(n as usize)?, AncillaMode::Reuse)?;
            let (f, g) = reuse_extrapolate(one.a, one.b, n, 0.1, noise.p_mes)?;
            worst = worst.max(((f - d.ratio) / d.ratio).abs()).max(((g - d.gamma) / d.gamma).abs());
        }
        s.max_err("vpure", "extrapolated = direct reuse, n = 2, 3 (relative)", worst, 1e-10);
        Ok(())
    });
    s.fallible("vpure", "Hadamard-test factors", |s| {
        let spec = hadamard_spec(17)?;
        let ideal = spec.ideal_value()?;
        let mut worst: f64 = 0.0;
        for c in ControlNoise::ALL {
            for eps in [0.05, 0.2] {
                let (xo, _) = hadamard_test(&spec, &c.state(eps)?)?;
                worst = worst.max((xo / ideal - c.expected_factor(eps)).abs());
            }
        }
        s.max_err("vpure", "xo / xo_ideal = channel factor", worst, 1e-10);
        Ok(())
    });
    s.fallible("vpure", "Monte Carlo consistency", |s| {
        let inputs = [werner(0.1)?];
        let exact = exact_virtual(&inputs, 0.1, &NoiseParams::reference(), &bell_projector(), AncillaMode::Fresh)?;
        let mc = mc_virtual(&inputs, 0.1, &NoiseParams::reference(), &bell_projector(), AncillaMode::Fresh, 100_000, 42)?;
        let z = (mc.ratio - exact.ratio).abs() / mc.stderr_ratio;
        s.push("vpure", "|MC − exact| / stderr at 1e5 shots", format!("{z:.3}"), "< 4".into(), z < 4.0);
        Ok(())
    });
}

fn shifted(d: QuasiProbDecomp, shift: f64) -> QuasiProbDecomp {
    let mut q = d.q;
    q[0] += shift;
    QuasiProbDecomp::from_coefficients(q)
}

fn baseline_checks(s: &mut Suite, opts: &SelftestOptions) {
    s.fallible("baselines", "PEC identity", |s| {
        let mut worst: f64 = 0.0;
        let mut norm: f64 = 0.0;
        for k in 0..=14 {
            let eps = 0.05 * k as f64;
            let d = shifted(pec_inverse_werner(eps)?, opts.pec_q_ii_shift);
            norm = norm.max((d.q.iter().sum::<f64>() - 1.0).abs());
            worst = worst.max(pec_apply_exact(&werner(eps)?, &d)?.matrix().max_abs_diff(bell().matrix()));
        }
        s.max_err("baselines", "PEC inverse ∘ Werner = Bell, ε ∈ {0, …, 0.7}", worst, 1e-12);
        s.max_err("baselines", "Σq = 1", norm, 1e-12);
        s.close("baselines", "PEC γ(0.1)", pec_inverse_werner(0.1)?.gamma, 1.0 + 0.6 / 2.6, 1e-9);
        let a = pec_inverse_bell_diagonal(&BellDiagonalParams::werner(0.2)?)?;
        let b = pec_inverse_werner(0.2)?;
        let red = a.q.iter().zip(b.q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        s.max_err("baselines", "Bell-diagonal decomposition reduces to Werner", red, 1e-12);
        let mut est: f64 = 0.0;
        for eps in [0.05, 0.1, 0.2] {
            est = est.max((pec_estimate_eps(eps, 2, Shots::Exact, 0)? - eps).abs());
        }
        s.max_err("baselines", "ε estimate recovers true ε (exact)", est, 1e-8);
        Ok(())
    });
    s.fallible("baselines", "drift robustness", |s| {
        let mut v = Vec::new();
        let mut p = Vec::new();
        for (i, eps_fin) in [0.05, 0.1, 0.15, 0.2].into_iter().enumerate() {
            let o = drift_experiment(&DriftSchedule::standard(eps_fin, i as u64)?, &NoiseParams::reference(), 0.1)?;
            v.push(o.vpure_infidelity);
            p.push(((o.eps_mean - 0.1).abs(), o.pec_infidelity));
        }
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
        let spread = (hi - lo) / lo;
        s.push("baselines", "vpure drift spread (relative)", format!("{spread:.4}"), "< 0.10".into(), spread < 0.10);
        let mono = p.iter().all(|a| p.iter().all(|b| a.0 <= b.0 + 1e-3 || a.1 > b.1));
        s.push("baselines", "PEC infidelity grows with |ε̄ − 0.1|", format!("{p:?}"), "monotone".into(), mono);
        Ok(())
    });
    s.fallible("baselines", "double selection", |s| {
        let ledger = double_selection_iterate(&werner(0.1)?, &NoiseParams::reference(), 15)?;
        let f = ledger.final_fidelity();
        s.push("baselines", "double-selection plateau at reference noise", format!("{f:.6}"), "in [0.994, 0.996]".into(), (0.994..=0.996).contains(&f));
        let clean = double_selection_iterate(&werner(0.3)?, &NoiseParams::zero(), 6)?;
        let mut prev = clean.f0;
        let mut ok = true;
        for r in &clean.rounds {
            ok &= r.fidelity > prev || 1.0 - prev < 1e-12;
            prev = r.fidelity;
        }
        s.push("baselines", "noiseless double selection increases F", format!("{prev:.12}"), "strictly increasing".into(), ok);
        Ok(())
    });
}

fn harness_checks(s: &mut Suite) {
    s.fallible("harness", "analytic vs numeric", |s| {
        let noise = NoiseParams::reference();
        let mut worst: f64 = 0.0;
        let mut xs = Vec::new();
        for i in 0..8 {
            let p2 = 0.03 * i as f64 / 7.0;
            let nz = NoiseParams::new(noise.p1, p2, noise.p_mes)?;
            let numeric = single_pair_infidelity(&nz, 0.1)?;
            worst = worst.max((numeric - analytic_fidelity(noise.p1, p2, 0.1)?.infidelity()).abs());
            xs.push((p2, numeric));
        }
        s.max_err("harness", "|numeric − analytic| over p₂ ∈ [0, 0.03]", worst, 2e-4);
        let slope = (xs[1].1 - xs[0].1) / (xs[1].0 - xs[0].0);
        let want = 8.0 * 0.1 / 15.0;
        s.push("harness", "small-p₂ slope vs 8ε/15", format!("{slope:.5}"), format!("{want:.5} ± 5%"), ((slope - want) / want).abs() < 0.05);
        Ok(())
    });
    s.fallible("harness", "deterministic CSV", |s| {
        let mut c = ExperimentConfig::new(Experiment::Fig2b);
        c.n = vec![1, 2, 8];
        let a = render_csv(&c, &run(&c)?)?;
        let b = render_csv(&c, &run(&c)?)?;
        s.push("harness", "identical config → identical CSV", format!("{} bytes", a.len()), "byte-identical".into(), a == b);
        Ok(())
    });
}

pub fn selftest(opts: &SelftestOptions) -> Vec<Check> {
    let mut s = Suite { checks: Vec::new() };
    qcore_checks(&mut s);
    vpure_checks(&mut s, opts);
    baseline_checks(&mut s, opts);
    harness_checks(&mut s);
    s.checks
}

pub fn render_report(checks: &[Check]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "{:4}  {:<10} {:<52} observed {}  expected {}\n",
            if c.passed { "ok" } else { "FAIL" },
            c.module,
            c.property,
            c.observed,
            c.expected
        ));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!("{} checks, {} failed\n", checks.len(), failed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(checks: &'a [Check], property: &str) -> &'a Check {
        checks.iter().find(|c| c.property.starts_with(property)).unwrap()
    }

    #[test]
    fn perturbations_are_detected() {
        let base = selftest(&SelftestOptions::default());
        assert!(find(&base, "PEC inverse").passed);
        assert!(find(&base, "(1/4) Σ S_i").passed);
        let bad = selftest(&SelftestOptions { pec_q_ii_shift: 1e-3, flip_yy_sign: true });
        assert!(!find(&bad, "PEC inverse").passed);
        assert!(!find(&bad, "Σq = 1").passed);
        assert!(!find(&bad, "(1/4) Σ S_i").passed);
        let report = render_report(&bad);
        assert!(report.contains("FAIL"));
    }
}
