//! Experiment runners. Each returns a [`Table`]; [`render_csv`] adds the
//! provenance comment line and serializes it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::analytic::analytic_fidelity;
use super::config::{Experiment, ExperimentConfig};
use crate::baselines::{double_selection_iterate, drift_experiment, DriftSchedule};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::qcore::{bell_projector, bell_projector_product, Channel, ComplexMatrix, DensityOp, Pauli};
use crate::rng::derive_seed;
use crate::states::{amp_damped_bell, bell_diagonal, dephased_bell, werner, BellDiagonalParams};
use crate::vpure::{
    exact_virtual, hadamard_test, knitting_bound, mc_virtual, per_bell_overhead, random_su2, reuse_extrapolate,
    virtual_yield, AncillaMode, HadamardTestSpec, Shots, VirtualEstimate,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn series(mode: AncillaMode) -> &'static str {
    match mode {
        AncillaMode::Fresh => "vpure_fresh",
        AncillaMode::Reuse => "vpure_reuse",
    }
}

fn mode_name(mode: AncillaMode) -> &'static str {
    match mode {
        AncillaMode::Fresh => "fresh",
        AncillaMode::Reuse => "reuse",
    }
}

/// n-pair purified fidelity and γ, simulated directly up to `exact_max_n`.
/// Fresh mode factorizes over pairs; reuse mode beyond the cap is extrapolated
/// from the n = 1 numerator and denominator.
fn n_pair(cfg: &ExperimentConfig, eps: f64, n: u32, mode: AncillaMode) -> Result<(f64, f64)> {
    let anc = cfg.ancilla_eps.unwrap_or(eps);
    let rho = werner(eps)?;
    if n <= cfg.exact_max_n {
        let inputs = vec![rho; n as usize];
        let v = exact_virtual(&inputs, anc, &cfg.noise, &bell_projector_product(n as usize)?, mode)?;
        return Ok((v.ratio, v.gamma));
    }
    let one = exact_virtual(&[rho], anc, &cfg.noise, &bell_projector(), mode)?;
    match mode {
        AncillaMode::Fresh => Ok((one.ratio.powi(n as i32), one.gamma.powi(n as i32))),
        AncillaMode::Reuse => reuse_extrapolate(one.a, one.b, n, anc, cfg.noise.p_mes),
    }
}

/// Pairs consumed per purified pair: one ancilla each, or one shared by n.
fn k_per_pair(mode: AncillaMode, n: u32) -> f64 {
    match mode {
        AncillaMode::Fresh => 2.0,
        AncillaMode::Reuse => (n as f64 + 1.0) / n as f64,
    }
}

fn grid_tasks<T: Copy + Send + Sync>(items: &[T], f: impl Fn(usize, T) -> Result<Vec<Vec<String>>> + Sync) -> Result<Vec<Vec<String>>> {
    let parts: Vec<Vec<Vec<String>>> = items.par_iter().enumerate().map(|(i, t)| f(i, *t)).collect::<Result<_>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn fig2a(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["series", "eps", "n", "fidelity", "yield", "gamma"]);
    let mut tasks = Vec::new();
    for &eps in &cfg.eps {
        for mode in [AncillaMode::Fresh, AncillaMode::Reuse] {
            for &n in &cfg.n {
                tasks.push((eps, mode, n));
            }
        }
    }
    t.rows = grid_tasks(&tasks, |_, (eps, mode, n)| {
        let (f, g) = n_pair(cfg, eps, n, mode)?;
        let per_pair = g.powf(1.0 / n as f64);
        let y = virtual_yield(&vec![per_pair; n as usize], &vec![k_per_pair(mode, n); n as usize])?;
        Ok(vec![vec![series(mode).into(), num(eps), n.to_string(), num(f.powf(1.0 / n as f64)), num(y), num(g)]])
    })?;
    t.rows.extend(grid_tasks(&cfg.eps, |_, eps| {
        let ledger = double_selection_iterate(&werner(eps)?, &cfg.noise, cfg.rounds)?;
        Ok(ledger
            .trajectory()
            .into_iter()
            .enumerate()
            .map(|(r, (f, y))| vec!["double_selection".into(), num(eps), (r + 1).to_string(), num(f), num(y), num(1.0)])
            .collect())
    })?);
    Ok(t)
}

fn fig2b(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["mode", "eps", "n", "gamma", "per_bell_overhead", "knitting_overhead", "ratio_to_knitting"]);
    let mut tasks = Vec::new();
    for mode in [AncillaMode::Fresh, AncillaMode::Reuse] {
        for &eps in &cfg.eps {
            for &n in &cfg.n {
                tasks.push((mode, eps, n));
            }
        }
    }
    t.rows = grid_tasks(&tasks, |_, (mode, eps, n)| {
        let (_, g) = n_pair(cfg, eps, n, mode)?;
        let ours = per_bell_overhead(g, n);
        let knit = per_bell_overhead(knitting_bound(n), n);
        Ok(vec![vec![mode_name(mode).into(), num(eps), n.to_string(), num(g), num(ours), num(knit), num(ours / knit)]])
    })?;
    Ok(t)
}

fn fig2c(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["eps_fin", "eps_mean", "vpure_infidelity", "pec_infidelity"]);
    let d = cfg.drift;
    t.rows = grid_tasks(&cfg.eps_fin, |i, eps_fin| {
        let seed = derive_seed(cfg.seed_or_zero(), "fig2c", i as u64);
        let s = DriftSchedule::new(d.eps_start, eps_fin, d.points, d.half_width, seed)?;
        let o = drift_experiment(&s, &cfg.noise, cfg.eps_assumed)?;
        Ok(vec![vec![num(eps_fin), num(o.eps_mean), num(o.vpure_infidelity), num(o.pec_infidelity)]])
    })?;
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlNoise {
    Werner,
    AmplitudeDamping,
    Dephasing,
    /// ε_x = ε_y = ε/4, ε_z = ε/2.
    BellDiagonal,
}

impl ControlNoise {
    pub const ALL: [ControlNoise; 4] =
        [ControlNoise::Werner, ControlNoise::AmplitudeDamping, ControlNoise::Dephasing, ControlNoise::BellDiagonal];

    pub fn name(&self) -> &'static str {
        match self {
            ControlNoise::Werner => "werner",
            ControlNoise::AmplitudeDamping => "amplitude_damping",
            ControlNoise::Dephasing => "dephasing",
            ControlNoise::BellDiagonal => "bell_diagonal",
        }
    }

    pub fn state(&self, eps: f64) -> Result<DensityOp> {
        match self {
            ControlNoise::Werner => werner(eps),
            ControlNoise::AmplitudeDamping => amp_damped_bell(eps),
            ControlNoise::Dephasing => dephased_bell(eps),
            ControlNoise::BellDiagonal => bell_diagonal(&BellDiagonalParams::new(eps / 4.0, eps / 4.0, eps / 2.0)?),
        }
    }

    /// Suppression of ⟨X⊗X⊗O⟩ relative to a perfect Bell control.
    pub fn expected_factor(&self, eps: f64) -> f64 {
        match self {
            ControlNoise::Werner => 1.0 - 4.0 * eps / 3.0,
            ControlNoise::AmplitudeDamping => 1.0 - eps,
            ControlNoise::Dephasing => (1.0 - 2.0 * eps).powi(2),
            ControlNoise::BellDiagonal => 1.0 - eps - eps / 2.0,
        }
    }
}

/// Random local unitaries on a werner(0.2) pair, observable Z⊗Z + X⊗I.
/// Draws are repeated until the ideal value is well away from zero.
pub fn hadamard_spec(seed: u64) -> Result<HadamardTestSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let obs = &Pauli::Z.matrix().kron(&Pauli::Z.matrix())? + &Pauli::X.matrix().kron(&ComplexMatrix::identity(2))?;
    loop {
        let spec = HadamardTestSpec::new(
            random_su2(&mut rng),
            random_su2(&mut rng),
            random_su2(&mut rng),
            random_su2(&mut rng),
            werner(0.2)?,
            Channel::identity(2),
            obs.clone(),
        )?;
        if spec.ideal_value()?.abs() > 0.05 {
            return Ok(spec);
        }
    }
}

fn sm_hadamard(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["control", "eps", "xo", "xo_ideal", "factor", "expected_factor"]);
    let mut tasks = Vec::new();
    for &eps in &cfg.eps {
        for c in ControlNoise::ALL {
            tasks.push((c, eps));
        }
    }
    t.rows = grid_tasks(&tasks, |i, (c, eps)| {
        let spec = hadamard_spec(derive_seed(cfg.seed_or_zero(), "sm_hadamard", i as u64))?;
        let (xo, _) = hadamard_test(&spec, &c.state(eps)?)?;
        let ideal = spec.ideal_value()?;
        Ok(vec![vec![c.name().into(), num(eps), num(xo), num(ideal), num(xo / ideal), num(c.expected_factor(eps))]])
    })?;
    Ok(t)
}

/// 1 − F for one Werner pair with an ancilla of the same infidelity.
pub fn single_pair_infidelity(noise: &NoiseParams, eps: f64) -> Result<f64> {
    Ok(1.0 - exact_virtual(&[werner(eps)?], eps, noise, &bell_projector(), AncillaMode::Fresh)?.ratio)
}

fn sm_analytic(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&["eps", "p2", "infidelity_numeric", "infidelity_analytic", "infidelity_leading", "abs_diff"]);
    let mut tasks = Vec::new();
    for &eps in &cfg.eps {
        for &p2 in &cfg.p2 {
            tasks.push((eps, p2));
        }
    }
    t.rows = grid_tasks(&tasks, |_, (eps, p2)| {
        let noise = NoiseParams::new(cfg.noise.p1, p2, cfg.noise.p_mes)?;
        let numeric = single_pair_infidelity(&noise, eps)?;
        let a = analytic_fidelity(noise.p1, p2, eps)?;
        Ok(vec![vec![
            num(eps),
            num(p2),
            num(numeric),
            num(a.infidelity()),
            num(1.0 - a.leading_order),
            num((numeric - a.infidelity()).abs()),
        ]])
    })?;
    Ok(t)
}

fn sm_reuse(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&[
        "eps",
        "n",
        "fidelity_direct",
        "fidelity_extrapolated",
        "gamma_direct",
        "gamma_extrapolated",
        "rel_diff_fidelity",
        "rel_diff_gamma",
    ]);
    let mut tasks = Vec::new();
    for &eps in &cfg.eps {
        for &n in &cfg.n {
            tasks.push((eps, n));
        }
    }
    t.rows = grid_tasks(&tasks, |_, (eps, n)| {
        let anc = cfg.ancilla_eps.unwrap_or(eps);
        let rho = werner(eps)?;
        let one = exact_virtual(std::slice::from_ref(&rho), anc, &cfg.noise, &bell_projector(), AncillaMode::Reuse)?;
        let (fx, gx) = reuse_extrapolate(one.a, one.b, n, anc, cfg.noise.p_mes)?;
        let mut row = vec![num(eps), n.to_string()];
        if n <= cfg.exact_max_n {
            let inputs = vec![rho; n as usize];
            let d = exact_virtual(&inputs, anc, &cfg.noise, &bell_projector_product(n as usize)?, AncillaMode::Reuse)?;
            row.extend([
                num(d.ratio),
                num(fx),
                num(d.gamma),
                num(gx),
                num((fx - d.ratio).abs() / d.ratio.abs()),
                num((gx - d.gamma).abs() / d.gamma),
            ]);
        } else {
            row.extend([String::new(), num(fx), String::new(), num(gx), String::new(), String::new()]);
        }
        Ok(vec![row])
    })?;
    Ok(t)
}

fn sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(&[
        "eps",
        "ancilla_eps",
        "n",
        "mode",
        "shots",
        "point_seed",
        "exact_ratio",
        "ratio",
        "stderr",
        "gamma",
        "a",
        "b",
    ]);
    let mut tasks = Vec::new();
    for &eps in &cfg.eps {
        for &n in &cfg.n {
            tasks.push((eps, n));
        }
    }
    t.rows = grid_tasks(&tasks, |i, (eps, n)| {
        let anc = cfg.ancilla_eps.unwrap_or(eps);
        let inputs = vec![werner(eps)?; n as usize];
        let obs = bell_projector_product(n as usize)?;
        let exact = exact_virtual(&inputs, anc, &cfg.noise, &obs, cfg.mode)?;
        let (seed, est): (u64, VirtualEstimate) = match cfg.shots {
            Shots::Exact => (0, exact),
            Shots::Finite(s) => {
                let seed = derive_seed(cfg.seed_or_zero(), "sweep", i as u64);
                (seed, mc_virtual(&inputs, anc, &cfg.noise, &obs, cfg.mode, s, seed)?)
            }
        };
        let shots = match cfg.shots {
            Shots::Exact => "exact".to_string(),
            Shots::Finite(s) => s.to_string(),
        };
        Ok(vec![vec![
            num(eps),
            num(anc),
            n.to_string(),
            mode_name(cfg.mode).into(),
            shots,
            seed.to_string(),
            num(exact.ratio),
            num(est.ratio),
            num(est.stderr_ratio),
            num(est.gamma),
            num(est.a),
            num(est.b),
        ]])
    })?;
    Ok(t)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Fig2a => fig2a(cfg),
        Experiment::Fig2b => fig2b(cfg),
        Experiment::Fig2c => fig2c(cfg),
        Experiment::SmHadamard => sm_hadamard(cfg),
        Experiment::SmAnalytic => sm_analytic(cfg),
        Experiment::SmReuse => sm_reuse(cfg),
        Experiment::Sweep => sweep(cfg),
    }
}

/// `# vpure <version> experiment=<id> seed=<seed> config_sha256=<hex>`, then header and rows.
pub fn render_csv(cfg: &ExperimentConfig, table: &Table) -> Result<String> {
    let mut out = format!(
        "# vpure {VERSION} experiment={} seed={} config_sha256={}\n",
        cfg.experiment.name(),
        cfg.seed_or_zero(),
        cfg.hash()
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&table.header).map_err(io)?;
    for r in &table.rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
    Ok(out)
}

/// Runs the experiment and writes `<dir>/<output>`; returns the path.
pub fn run_to_dir(cfg: &ExperimentConfig, dir: &std::path::Path) -> Result<std::path::PathBuf> {
    let text = render_csv(cfg, &run(cfg)?)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(cfg.output_name());
    std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}
