use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};

use super::output::write_metadata;
use super::phase::count_successes;
use super::TrialConfig;

/// Smallest-`M` search for each sparsity. `base.m` is ignored; `base.trials`
/// is the number of trials per probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MstarConfig {
    pub base: TrialConfig,
    pub k_grid: Vec<usize>,
    pub p_star: f64,
    /// Bisection stops once the bracket is at most this wide.
    pub resolution: usize,
}

impl MstarConfig {
    pub fn new(base: TrialConfig, k_grid: Vec<usize>, p_star: f64) -> Self {
        Self {
            base: TrialConfig {
                trials: 100,
                ..base
            },
            k_grid,
            p_star,
            resolution: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MstarRow {
    pub k: usize,
    /// `N` when even full sampling misses the target (saturation).
    pub m_star: usize,
    /// `m_star / (k ln N)`
    pub ratio: f64,
    pub saturated: bool,
}

fn probe(base: &TrialConfig, k: usize, m: usize) -> Result<f64> {
    let cfg = TrialConfig { k, m, ..*base };
    Ok(count_successes(&cfg)? as f64 / cfg.trials as f64)
}

/// Bisection over `M` for the smallest measurement count whose empirical
/// recovery rate reaches `p_star`. Every probe reuses the same trial seeds.
pub fn find_m_star(cfg: &MstarConfig, k: usize) -> Result<MstarRow> {
    let n = cfg.base.n;
    let row = |m_star: usize, saturated| MstarRow {
        k,
        m_star,
        ratio: m_star as f64 / (k as f64 * (n as f64).ln()),
        saturated,
    };
    if probe(&cfg.base, k, n)? < cfg.p_star {
        return Ok(row(n, true));
    }
    // rate(lo) < p_star (lo = 0 means no measurements), rate(hi) >= p_star
    let (mut lo, mut hi) = (0usize, n);
    while hi - lo > cfg.resolution {
        let mid = lo + (hi - lo) / 2;
        if probe(&cfg.base, k, mid)? >= cfg.p_star {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(row(hi, false))
}

pub fn run_measurement_scaling(
    cfg: &MstarConfig,
    mut sink: impl FnMut(&MstarRow) -> Result<()>,
) -> Result<Vec<MstarRow>> {
    if !(cfg.p_star > 0.0 && cfg.p_star < 1.0) {
        return Err(SrmError::Config(format!(
            "p_star={} must lie in (0, 1)",
            cfg.p_star
        )));
    }
    if cfg.k_grid.is_empty() || cfg.k_grid.contains(&0) {
        return Err(SrmError::Config(
            "k grid must be nonempty and positive".into(),
        ));
    }
    if cfg.resolution == 0 {
        return Err(SrmError::Config("resolution must be at least 1".into()));
    }
    cfg.base.validate()?;
    let mut rows = Vec::with_capacity(cfg.k_grid.len());
    for &k in &cfg.k_grid {
        let r = find_m_star(cfg, k)?;
        sink(&r)?;
        rows.push(r);
    }
    Ok(rows)
}

pub const MSTAR_HEADER: &str = "k,m_star,ratio";

pub fn write_mstar_csv(out: &mut dyn Write, cfg: &MstarConfig) -> Result<Vec<MstarRow>> {
    write_metadata(out, cfg.base.master_seed, cfg)?;
    writeln!(out, "{MSTAR_HEADER}")?;
    run_measurement_scaling(cfg, |r| {
        writeln!(out, "{},{},{}", r.k, r.m_star, r.ratio)?;
        out.flush()?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::TransformKind;

    fn cfg(ens: &str, psi: TransformKind, n: usize, trials: usize) -> MstarConfig {
        let mut base = TrialConfig::new(n, n, 1, ens.parse().unwrap(), psi);
        base.master_seed = 5;
        let mut c = MstarConfig::new(base, vec![1], 0.9);
        c.base.trials = trials;
        c
    }

    #[test]
    fn single_spike_needs_few_measurements() {
        let c = cfg("wht256-l", TransformKind::Dct, 256, 40);
        let r = find_m_star(&c, 1).unwrap();
        assert!(!r.saturated);
        assert!((r.m_star as f64) <= 12.0 * 256f64.ln(), "{r:?}");
    }

    #[test]
    fn bisection_brackets_the_threshold() {
        let c = cfg("wht64-l", TransformKind::Identity, 64, 30);
        let r = find_m_star(&c, 4).unwrap();
        assert!(probe(&c.base, 4, r.m_star).unwrap() >= 0.9);
        let below = r.m_star.saturating_sub(c.resolution);
        if below > 0 {
            assert!(probe(&c.base, 4, below).unwrap() < 0.9);
        }
        assert!((r.ratio - r.m_star as f64 / (4.0 * 64f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn full_sampling_always_reaches_target() {
        let c = cfg("wht16-g", TransformKind::Identity, 16, 10);
        let r = find_m_star(&c, 4).unwrap();
        assert!(!r.saturated && r.m_star <= 16);
        assert_eq!(probe(&c.base, 4, 16).unwrap(), 1.0);
    }

    #[test]
    fn invalid_targets_rejected() {
        let mut c = cfg("wht64-l", TransformKind::Identity, 64, 10);
        for p in [0.0, 1.0, -0.5, f64::NAN] {
            c.p_star = p;
            assert!(run_measurement_scaling(&c, |_| Ok(())).is_err());
        }
        c.p_star = 0.9;
        c.k_grid = vec![];
        assert!(run_measurement_scaling(&c, |_| Ok(())).is_err());
    }
}
