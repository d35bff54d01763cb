use num_complex::Complex64 as C64;
use proptest::prelude::*;
use vpure_core::baselines::{double_selection_iterate, pec_apply_exact, pec_inverse_bell_diagonal, DriftSchedule};
use vpure_core::noise::{amplitude_damping, depolarize1, depolarize2};
use vpure_core::qcore::{apply_channel, bell_projector, bell_projector_product, tensor};
use vpure_core::states::{bell_diagonal, werner};
use vpure_core::vpure::exact_virtual;
use vpure_core::{AncillaMode, BellDiagonalParams, ComplexMatrix, DensityOp, NoiseParams};

/// Mixture of three pure states built from raw amplitudes.
fn mixed_state(qubits: usize, amps: &[f64], weights: [f64; 3]) -> DensityOp {
    let d = 1 << qubits;
    let total: f64 = weights.iter().sum();
    let mut acc = ComplexMatrix::zeros(d);
    for (k, w) in weights.iter().enumerate() {
        let v: Vec<C64> = (0..d).map(|i| C64::new(amps[2 * (k * d + i)], amps[2 * (k * d + i) + 1])).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
        acc.add_scaled(&ComplexMatrix::outer(&v).unwrap(), w / total).unwrap();
    }
    DensityOp::physical(acc).unwrap()
}

fn bell_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(r, c)] = C64::new(0.5, 0.0);
    }
    m
}

fn amps(qubits: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 6 << qubits).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 0.1))
}

fn weights() -> impl Strategy<Value = [f64; 3]> {
    [0.05..1.0f64, 0.05..1.0f64, 0.05..1.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn local_channel_commutes_with_tensor(a in amps(1), wa in weights(), b in amps(2), wb in weights(), p in 0.0..0.75f64) {
        let ra = mixed_state(1, &a, wa);
        let rb = mixed_state(2, &b, wb);
        let ch = depolarize1(p).unwrap();
        let lhs = apply_channel(&tensor(&ra, &rb).unwrap(), &ch, &[0]).unwrap();
        let rhs = tensor(&apply_channel(&ra, &ch, &[0]).unwrap(), &rb).unwrap();
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
        let amp = amplitude_damping(p).unwrap();
        let lhs = apply_channel(&tensor(&rb, &ra).unwrap(), &amp, &[2]).unwrap();
        let rhs = tensor(&rb, &apply_channel(&ra, &amp, &[0]).unwrap()).unwrap();
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn pauli_mixture_matches_kraus(a in amps(3), w in weights(), p in 0.0..0.9375f64, t0 in 0usize..3, dt in 1usize..3) {
        let rho = mixed_state(3, &a, w);
        let ch = depolarize2(p).unwrap();
        let targets = [t0, (t0 + dt) % 3];
        let mix = apply_channel(&rho, &ch, &targets).unwrap();
        let kraus = apply_channel(&rho, &ch.to_kraus(), &targets).unwrap();
        prop_assert!(mix.matrix().max_abs_diff(kraus.matrix()) < 1e-12);
        prop_assert!((mix.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_gadget_is_exact(ex in 0.0..0.2f64, ey in 0.0..0.2f64, ez in 0.0..0.2f64, anc in 0.0..0.5f64, reuse: bool) {
        let p = BellDiagonalParams::new(ex, ey, ez).unwrap();
        let mode = if reuse { AncillaMode::Reuse } else { AncillaMode::Fresh };
        let inputs = [bell_diagonal(&p).unwrap()];
        let v = exact_virtual(&inputs, anc, &NoiseParams::zero(), &bell_projector(), mode).unwrap();
        prop_assert!((v.ratio - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pec_inverts_bell_diagonal_noise(ex in 0.0..0.24f64, ey in 0.0..0.24f64, ez in 0.0..0.24f64) {
        let p = BellDiagonalParams::new(ex, ey, ez).unwrap();
        let d = pec_inverse_bell_diagonal(&p).unwrap();
        prop_assert!((d.q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((d.gamma - d.q.iter().map(|x| x.abs()).sum::<f64>()).abs() < 1e-12);
        let out = pec_apply_exact(&bell_diagonal(&p).unwrap(), &d).unwrap();
        prop_assert!(out.matrix().max_abs_diff(&bell_matrix()) < 1e-10);
    }

    #[test]
    fn drift_without_jitter_is_linear(start in 0.0..0.5f64, fin in 0.0..0.5f64, n in 1usize..200, seed: u64) {
        let s = DriftSchedule::new(start, fin, n, 0.0, seed).unwrap();
        let pts = s.points();
        prop_assert_eq!(pts.len(), n);
        for (i, e) in pts.iter().enumerate() {
            let want = start + (fin - start) * (i + 1) as f64 / n as f64;
            prop_assert!((e - want).abs() < 1e-14);
        }
        let mean = start + (fin - start) * (n + 1) as f64 / (2 * n) as f64;
        prop_assert!((s.mean_eps() - mean).abs() < 1e-12);
        // Werner states are affine in ε, so the average is werner(ε̄).
        let avg = s.averaged_state().unwrap();
        prop_assert!(avg.matrix().max_abs_diff(werner(mean).unwrap().matrix()) < 1e-12);
    }
}

#[test]
fn pec_identity_on_grid() {
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let p = BellDiagonalParams::new(0.05 * i as f64, 0.05 * j as f64, 0.05 * k as f64).unwrap();
                let out = pec_apply_exact(&bell_diagonal(&p).unwrap(), &pec_inverse_bell_diagonal(&p).unwrap()).unwrap();
                assert!(out.matrix().max_abs_diff(&bell_matrix()) < 1e-10, "{p:?}");
            }
        }
    }
}

#[test]
fn double_selection_yield_definition() {
    let ledger = double_selection_iterate(&werner(0.1).unwrap(), &NoiseParams::reference(), 4).unwrap();
    assert_eq!(ledger.n_round(), 4);
    let mut y = 1.0;
    for (r, (f, cum)) in ledger.rounds.iter().zip(ledger.trajectory()) {
        assert_eq!(r.k, 3);
        assert!(r.p_success > 0.0 && r.p_success <= 1.0);
        y *= r.p_success / 3.0;
        assert!((cum - y).abs() < 1e-15);
        assert_eq!(f, r.fidelity);
    }
    assert!((ledger.total_yield() - y).abs() < 1e-15);
    assert!(y < 3f64.powi(-4));
}

#[test]
fn readout_flips_cancel_in_ratio() {
    for mode in [AncillaMode::Fresh, AncillaMode::Reuse] {
        for n in 1..=2usize {
            let inputs = vec![werner(0.1).unwrap(); n];
            let obs = bell_projector_product(n).unwrap();
            let base = exact_virtual(&inputs, 0.1, &NoiseParams::new(0.001, 0.01, 0.0).unwrap(), &obs, mode).unwrap();
            for p_mes in [0.03, 0.1] {
                let v = exact_virtual(&inputs, 0.1, &NoiseParams::new(0.001, 0.01, p_mes).unwrap(), &obs, mode).unwrap();
                assert!((v.ratio - base.ratio).abs() < 1e-10, "{mode:?} n={n} p_mes={p_mes}");
            }
        }
    }
}
