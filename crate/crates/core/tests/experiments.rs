use srm_core::experiments::{
    find_m_star, run_compressible_experiment, run_phase_curve, CompressibleConfig, MstarConfig,
    PhaseConfig, TrialConfig,
};
use srm_core::transforms::TransformKind;

#[test]
fn gaussian_baseline_regimes() {
    let mut base = TrialConfig::new(256, 128, 0, "gaussian".parse().unwrap(), TransformKind::Dct);
    base.trials = 200;
    let curve = run_phase_curve(
        &PhaseConfig {
            base,
            k_grid: vec![10, 60],
        },
        |_, _| Ok(()),
    )
    .unwrap();
    assert!(curve.probabilities[0] >= 0.98, "{curve:?}");
    assert!(curve.probabilities[1] <= 0.5, "{curve:?}");
}

#[test]
fn phase_curve_is_weakly_decreasing() {
    let mut base = TrialConfig::new(256, 128, 0, "wht256-l".parse().unwrap(), TransformKind::Dct);
    base.trials = 100;
    let curve = run_phase_curve(
        &PhaseConfig {
            base,
            k_grid: vec![10, 20, 30, 40, 50, 60],
        },
        |_, _| Ok(()),
    )
    .unwrap();
    for i in 1..curve.axis.len() {
        let slack = 2.0 * curve.wilson_halfwidth[i].max(curve.wilson_halfwidth[i - 1]);
        assert!(
            curve.probabilities[i] <= curve.probabilities[i - 1] + slack,
            "{curve:?}"
        );
    }
}

#[test]
fn block_operator_needs_more_measurements() {
    let m_star = |ens: &str| {
        let base = TrialConfig::new(256, 256, 15, ens.parse().unwrap(), TransformKind::Identity);
        find_m_star(&MstarConfig::new(base, vec![15], 0.9), 15).unwrap()
    };
    let dense = m_star("wht256-l");
    let block = m_star("wht64-l");
    assert!(block.m_star >= dense.m_star, "{block:?} vs {dense:?}");
}

#[test]
fn single_spike_measurement_count() {
    let base = TrialConfig::new(256, 256, 1, "wht256-l".parse().unwrap(), TransformKind::Dct);
    let r = find_m_star(&MstarConfig::new(base, vec![1], 0.9), 1).unwrap();
    assert!(r.m_star as f64 <= 12.0 * 256f64.ln(), "{r:?}");
}

#[test]
fn compressible_psnr_grows_with_rate() {
    let cfg = CompressibleConfig {
        rates: vec![0.15, 0.25, 0.35, 0.5, 1.0],
        trials: 2,
        ..Default::default()
    };
    let rows = run_compressible_experiment(&cfg, |_| Ok(())).unwrap();
    for per_ensemble in rows.chunks(cfg.rates.len()) {
        for w in per_ensemble.windows(2) {
            assert!(w[1].psnr_db >= w[0].psnr_db - 0.5, "{w:?}");
        }
        let full = per_ensemble.last().unwrap();
        assert_eq!(full.m, 4096);
        assert!(full.psnr_db >= 100.0, "{full:?}");
    }
}
