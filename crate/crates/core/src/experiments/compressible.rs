use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};
use crate::linear_map::LinearMap;
use crate::operator::compose;
use crate::randomize::fisher_yates;
use crate::recovery::{solve_l1, L1Options};
use crate::rng::{derive_seed, rng_from_seed, Stream};
use crate::transforms::{Basis, TransformKind, TransformSpec};

use super::output::write_metadata;
use super::Ensemble;

/// Power-law compressible signal: the `i`-th largest coefficient has
/// magnitude `i^-decay`, placed at a random position with a random sign.
pub fn power_law_coefficients(n: usize, decay: f64, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    let positions = fisher_yates(n, &mut rng);
    let mut alpha = vec![0.0; n];
    for (rank, &pos) in positions.iter().enumerate() {
        let sign = if rand::RngCore::next_u64(&mut rng) >> 63 == 0 {
            1.0
        } else {
            -1.0
        };
        alpha[pos] = sign * ((rank + 1) as f64).powf(-decay);
    }
    alpha
}

/// `20 log10(max|x| / rms(x_hat - x))`; infinite for a perfect estimate.
pub fn psnr(x: &[f64], x_hat: &[f64]) -> f64 {
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mse = x
        .iter()
        .zip(x_hat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.len() as f64;
    20.0 * (peak / mse.sqrt()).log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressibleConfig {
    pub n: usize,
    pub decay: f64,
    pub psi: TransformKind,
    pub rates: Vec<f64>,
    pub ensembles: Vec<Ensemble>,
    /// Independent signals per cell; the reported PSNR is their mean.
    pub trials: usize,
    pub master_seed: u64,
    pub include_dc: bool,
    pub solver: L1Options,
}

impl Default for CompressibleConfig {
    fn default() -> Self {
        Self {
            n: 4096,
            decay: 1.5,
            psi: TransformKind::Db8Wavelet,
            rates: vec![0.15, 0.25, 0.35, 0.5],
            ensembles: vec!["dct-l".parse().unwrap(), "wht32-g".parse().unwrap()],
            trials: 4,
            master_seed: 0,
            include_dc: true,
            solver: L1Options {
                tau_rel: 1e-6,
                ..L1Options::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressibleRow {
    pub ensemble: Ensemble,
    pub n: usize,
    pub rate: f64,
    pub m: usize,
    pub psnr_db: f64,
}

/// Measurement count for a sampling rate, at least 1 and at most `n`.
pub fn measurements_for_rate(n: usize, rate: f64) -> usize {
    ((rate * n as f64).round() as usize).clamp(1, n)
}

impl CompressibleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SrmError::Config("trials must be at least 1".into()));
        }
        if self.rates.is_empty() || self.rates.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(SrmError::Config("rates must lie in (0, 1]".into()));
        }
        if self.decay.is_nan() || self.decay <= 0.0 {
            return Err(SrmError::Config("decay must be positive".into()));
        }
        TransformSpec::full(self.psi, self.n).validate()?;
        for e in &self.ensembles {
            if let Ensemble::Srm { transform, .. } = *e {
                TransformSpec::block(transform, self.n, e.block_for(self.n)).validate()?;
            }
        }
        Ok(())
    }

    /// Signal and sensing seeds depend on the trial only, so the subsets for
    /// increasing rates are nested.
    fn seed(&self, trial: u64, stream: Stream) -> u64 {
        derive_seed(self.master_seed, &[trial, stream as u64])
    }
}

/// PSNR of one reconstruction at `m` measurements.
pub fn compressible_trial(
    cfg: &CompressibleConfig,
    ensemble: Ensemble,
    m: usize,
    trial: u64,
) -> Result<f64> {
    let basis = TransformSpec::full(cfg.psi, cfg.n);
    let alpha = power_law_coefficients(cfg.n, cfg.decay, cfg.seed(trial, Stream::Signal));
    let x = Basis::new(basis)?.forward(&alpha)?;
    let phi = ensemble.build(
        cfg.n,
        m,
        cfg.seed(trial, Stream::Randomizer),
        cfg.seed(trial, Stream::Subsample),
        cfg.include_dc,
    )?;
    let y = phi.forward(&x)?;
    let a = compose(phi, Basis::new(basis)?)?;
    let solved = solve_l1(&a, &y, &cfg.solver)?;
    let x_hat = Basis::new(basis)?.forward(&solved.alpha_hat)?;
    Ok(psnr(&x, &x_hat))
}

/// Rows in `(ensemble, rate)` order.
pub fn run_compressible_experiment(
    cfg: &CompressibleConfig,
    mut sink: impl FnMut(&CompressibleRow) -> Result<()>,
) -> Result<Vec<CompressibleRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &ensemble in &cfg.ensembles {
        for &rate in &cfg.rates {
            let m = measurements_for_rate(cfg.n, rate);
            let values = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| compressible_trial(cfg, ensemble, m, t))
                .collect::<Result<Vec<_>>>()?;
            let row = CompressibleRow {
                ensemble,
                n: cfg.n,
                rate,
                m,
                psnr_db: values.iter().sum::<f64>() / values.len() as f64,
            };
            sink(&row)?;
            rows.push(row);
        }
    }
    Ok(rows)
}

pub const COMPRESSIBLE_HEADER: &str = "ensemble,n,rate,m,psnr_db";

pub fn write_compressible_csv(
    out: &mut dyn Write,
    cfg: &CompressibleConfig,
) -> Result<Vec<CompressibleRow>> {
    write_metadata(out, cfg.master_seed, cfg)?;
    writeln!(out, "{COMPRESSIBLE_HEADER}")?;
    run_compressible_experiment(cfg, |r| {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.ensemble, r.n, r.rate, r.m, r.psnr_db
        )?;
        out.flush()?;
        Ok(())
    })
}
