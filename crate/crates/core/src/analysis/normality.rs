//! Distribution of the entries of `Phi Psi` against a Gaussian.
//!
//! Entries are pooled across independently seeded operators and treated as
//! identically distributed draws. They are not independent, so the KS
//! distance is a descriptive statistic here, not a test with a p-value.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf_inv, erfc};

use crate::error::{Result, SrmError};
use crate::linear_map::{materialize, LinearMap, DEFAULT_MATERIALIZE_CAP};
use crate::operator::{SrmOperator, SrmSpec};
use crate::rng::derive_seed;

/// Number of quantile pairs in a QQ report (levels 0.01 ..= 0.99).
pub const QQ_POINTS: usize = 99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub ks_distance: f64,
    /// Variance of the raw (unstandardized) pooled entries.
    pub sigma2_hat: f64,
    pub mean_hat: f64,
    pub num_entries: usize,
    pub num_seeds: usize,
    /// `(theoretical, empirical)` standard-normal quantile pairs.
    pub qq_pairs: Vec<(f64, f64)>,
    #[serde(skip)]
    pub sample: Vec<f64>,
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn normal_quantile(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * erf_inv(2.0 * p - 1.0)
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `sample` and
/// the standard normal CDF.
pub fn ks_statistic(sample: &[f64]) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Linear-interpolated quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

/// Builds a report from an arbitrary pooled sample.
pub fn normality_of_sample(raw: Vec<f64>, num_seeds: usize) -> Result<NormalityReport> {
    if raw.len() < 2 {
        return Err(SrmError::Config("need at least two entries".into()));
    }
    let count = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / count;
    let var = raw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
    if var.is_nan() || var <= 0.0 {
        return Err(SrmError::Numerical(
            "degenerate sample with zero variance".into(),
        ));
    }
    let sd = var.sqrt();
    let mut sample: Vec<f64> = raw.iter().map(|v| (v - mean) / sd).collect();
    let ks_distance = ks_statistic(&sample);
    sample.sort_by(f64::total_cmp);
    let qq_pairs = (1..=QQ_POINTS)
        .map(|i| {
            let p = i as f64 / (QQ_POINTS + 1) as f64;
            (normal_quantile(p), quantile_sorted(&sample, p))
        })
        .collect();
    Ok(NormalityReport {
        ks_distance,
        sigma2_hat: var,
        mean_hat: mean,
        num_entries: raw.len(),
        num_seeds,
        qq_pairs,
        sample,
    })
}

/// Pools the entries of `Phi Psi` over `num_seeds` operators derived from
/// `base` (seed `s` re-derives both the randomizer and the subsample seed)
/// and compares their standardized distribution to `N(0, 1)`.
pub fn normality_report(
    base: &SrmSpec,
    psi: &dyn LinearMap,
    num_seeds: usize,
) -> Result<NormalityReport> {
    if num_seeds == 0 {
        return Err(SrmError::Config("num_seeds must be at least 1".into()));
    }
    if base.n > DEFAULT_MATERIALIZE_CAP {
        return Err(SrmError::Size {
            dim: base.n,
            cap: DEFAULT_MATERIALIZE_CAP,
        });
    }
    let psi_m = materialize(psi)?;
    let blocks = (0..num_seeds as u64)
        .into_par_iter()
        .map(|s| {
            let mut spec = *base;
            spec.randomizer.seed = derive_seed(base.randomizer.seed, &[s]);
            spec.subsample.seed = derive_seed(base.subsample.seed, &[s]);
            let phi = materialize(&SrmOperator::new(&spec)?)?;
            Ok((phi * &psi_m).as_slice().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    normality_of_sample(blocks.concat(), num_seeds)
}
