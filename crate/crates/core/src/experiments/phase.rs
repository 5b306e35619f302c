use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};

use super::output::write_metadata;
use super::{trial_outcome, Ensemble, TrialConfig};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Halfwidth of the Wilson score interval at 95% confidence.
pub fn wilson_halfwidth(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// A phase curve: `base` evaluated at each sparsity in `k_grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseConfig {
    pub base: TrialConfig,
    pub k_grid: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCurve {
    pub ensemble: Ensemble,
    pub n: usize,
    pub m: usize,
    /// Sparsity values, in the order given.
    pub axis: Vec<usize>,
    pub trials: usize,
    pub successes: Vec<usize>,
    pub probabilities: Vec<f64>,
    pub wilson_halfwidth: Vec<f64>,
}

pub const PHASE_HEADER: &str = "ensemble,n,m,k,trials,successes,probability,wilson_halfwidth";

impl PhaseCurve {
    pub fn row(&self, i: usize) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.ensemble,
            self.n,
            self.m,
            self.axis[i],
            self.trials,
            self.successes[i],
            self.probabilities[i],
            self.wilson_halfwidth[i]
        )
    }
}

/// Number of successful trials of `cfg` (trials run concurrently, counted in
/// index order).
pub fn count_successes(cfg: &TrialConfig) -> Result<usize> {
    cfg.validate()?;
    let outcomes = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| trial_outcome(cfg, i).map(|o| o.success))
        .collect::<Result<Vec<_>>>()?;
    Ok(outcomes.into_iter().filter(|&s| s).count())
}

/// Runs the curve point by point. Each completed row is passed to `sink`
/// (e.g. to stream it to a CSV file) before the next point starts.
pub fn run_phase_curve(
    cfg: &PhaseConfig,
    mut sink: impl FnMut(&PhaseCurve, usize) -> Result<()>,
) -> Result<PhaseCurve> {
    if cfg.k_grid.is_empty() {
        return Err(SrmError::Config("k grid must not be empty".into()));
    }
    let base = &cfg.base;
    let mut curve = PhaseCurve {
        ensemble: base.ensemble,
        n: base.n,
        m: base.m,
        axis: Vec::new(),
        trials: base.trials,
        successes: Vec::new(),
        probabilities: Vec::new(),
        wilson_halfwidth: Vec::new(),
    };
    for &k in &cfg.k_grid {
        let point = TrialConfig { k, ..*base };
        let s = count_successes(&point)?;
        curve.axis.push(k);
        curve.successes.push(s);
        curve.probabilities.push(s as f64 / base.trials as f64);
        curve
            .wilson_halfwidth
            .push(wilson_halfwidth(s, base.trials));
        sink(&curve, curve.axis.len() - 1)?;
    }
    Ok(curve)
}

/// Runs the curve and streams it to `out` as CSV.
pub fn write_phase_csv(out: &mut dyn Write, cfg: &PhaseConfig) -> Result<PhaseCurve> {
    write_metadata(out, cfg.base.master_seed, cfg)?;
    writeln!(out, "{PHASE_HEADER}")?;
    run_phase_curve(cfg, |c, i| {
        writeln!(out, "{}", c.row(i))?;
        out.flush()?;
        Ok(())
    })
}
