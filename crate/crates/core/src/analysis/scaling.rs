//! Empirical coherence scaling: `max over seeds of mu(F R, Psi)` on a grid
//! of signal lengths and block sizes, normalized by `sqrt(ln N / B)`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};
use crate::experiments::output::write_metadata;
use crate::linear_map::LinearMap;
use crate::randomize::{build_randomizer, RandomizerKind, RandomizerSpec};
use crate::rng::derive_seed;
use crate::transforms::{Basis, Transform, TransformKind, TransformSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheckConfig {
    pub n_grid: Vec<usize>,
    /// Block size of `F`; `None` means one dense block (`B = N`).
    pub block: Option<usize>,
    pub transform: TransformKind,
    pub psi: TransformKind,
    pub randomizers: Vec<RandomizerKind>,
    pub seeds: usize,
    pub master_seed: u64,
}

impl Default for ScalingCheckConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![128, 256, 512, 1024],
            block: None,
            transform: TransformKind::Dct,
            psi: TransformKind::Db8Wavelet,
            randomizers: vec![RandomizerKind::Local, RandomizerKind::Global],
            seeds: 50,
            master_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCell {
    pub n: usize,
    pub b: usize,
    pub randomizer: RandomizerKind,
    /// max over seeds of `mu(F R, Psi)`
    pub mu: f64,
    /// `mu * sqrt(B / ln N)`
    pub normalized_stat: f64,
}

/// `max |S_ij|` for `S = F R Psi`, computed column by column without
/// materializing.
pub fn coherence_of_randomized(
    f: &Transform,
    r: &crate::randomize::Randomizer,
    psi: &dyn LinearMap,
) -> Result<f64> {
    let n = f.len();
    (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let mut col = r.apply(&psi.forward(&e)?)?;
            f.apply_in_place(&mut col)?;
            Ok(col.iter().fold(0.0f64, |m, v| m.max(v.abs())))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

pub fn coherence_scaling_check(cfg: &ScalingCheckConfig) -> Result<Vec<ScalingCell>> {
    if cfg.seeds == 0 {
        return Err(SrmError::Config("seeds must be at least 1".into()));
    }
    let mut cells = Vec::new();
    for &n in &cfg.n_grid {
        let b = cfg.block.map_or(n, |b| b.min(n));
        let f = Transform::new(TransformSpec::block(cfg.transform, n, b))?;
        let psi = Basis::new(TransformSpec::full(cfg.psi, n))?;
        for (ri, &kind) in cfg.randomizers.iter().enumerate() {
            let mu = (0..cfg.seeds as u64)
                .map(|s| {
                    let seed = derive_seed(cfg.master_seed, &[n as u64, ri as u64, s]);
                    let r = build_randomizer(&RandomizerSpec {
                        kind,
                        seed,
                        length: n,
                    })?;
                    coherence_of_randomized(&f, &r, &psi)
                })
                .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
            cells.push(ScalingCell {
                n,
                b,
                randomizer: kind,
                mu,
                normalized_stat: mu * (b as f64 / (n as f64).ln()).sqrt(),
            });
        }
    }
    Ok(cells)
}

/// Writes the scaling table as CSV: `n,b,randomizer,mu,normalized_stat`.
///
/// The metadata records the heterogeneity of `Psi` and its smallest column
/// support, which the global-randomizer bound is conditioned on.
pub fn write_scaling_csv(
    out: &mut dyn Write,
    cfg: &ScalingCheckConfig,
    cells: &[ScalingCell],
) -> Result<()> {
    write_metadata(out, cfg.master_seed, cfg)?;
    for &n in &cfg.n_grid {
        if n <= crate::linear_map::DEFAULT_MATERIALIZE_CAP {
            let h = super::heterogeneity(&Basis::new(TransformSpec::full(cfg.psi, n))?)?;
            let min_support = h.support_sizes.iter().min().copied().unwrap_or(0);
            writeln!(
                out,
                "# psi_n={n} rho_psi={} min_column_support={min_support}",
                h.rho_psi
            )?;
        }
    }
    writeln!(out, "n,b,randomizer,mu,normalized_stat")?;
    for c in cells {
        let r = match c.randomizer {
            RandomizerKind::Local => "local",
            RandomizerKind::Global => "global",
        };
        writeln!(out, "{},{},{},{},{}", c.n, c.b, r, c.mu, c.normalized_stat)?;
    }
    Ok(())
}
