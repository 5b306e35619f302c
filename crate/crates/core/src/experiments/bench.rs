use std::hint::black_box;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};
use crate::linear_map::LinearMap;
use crate::operator::{srm_forward, SrmOperator};
use crate::rng::{derive_seed, rng_from_seed};

use super::output::write_metadata;
use super::Ensemble;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    /// `M = N / m_divisor`
    pub m_divisor: usize,
    pub ensemble: Ensemble,
    pub repetitions: usize,
    /// Largest `N` for which the explicit dense baseline is built.
    pub dense_cap: usize,
    /// Each timed batch runs at least this long.
    pub min_batch_secs: f64,
    pub master_seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![1024, 2048, 4096, 8192],
            m_divisor: 4,
            ensemble: "wht-l".parse().unwrap(),
            repetitions: 20,
            dense_cap: 8192,
            min_batch_secs: 2e-3,
            master_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    pub m: usize,
    /// Median seconds per forward application.
    pub srm_forward_time: f64,
    /// `None` when the dense baseline was skipped.
    pub dense_multiply_time: Option<f64>,
    pub storage_bits_srm: u64,
    pub storage_bits_dense: u64,
}

/// `2N + N log2 N` bits.
pub fn storage_bits_srm(n: usize) -> u64 {
    let n = n as u64;
    2 * n + n * u64::from(n.trailing_zeros())
}

pub fn storage_bits_dense(n: usize, m: usize) -> u64 {
    (m as u64) * (n as u64)
}

/// Median seconds per call of `f` over `reps` batches, each batch sized to
/// last at least `min_batch`.
fn median_time(reps: usize, min_batch: Duration, mut f: impl FnMut()) -> f64 {
    let mut calls = 1usize;
    loop {
        let t0 = Instant::now();
        for _ in 0..calls {
            f();
        }
        if t0.elapsed() >= min_batch || calls >= 1 << 24 {
            break;
        }
        calls *= 2;
    }
    let mut samples: Vec<f64> = (0..reps)
        .map(|_| {
            let t0 = Instant::now();
            for _ in 0..calls {
                f();
            }
            t0.elapsed().as_secs_f64() / calls as f64
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    }
}

fn dense_baseline(n: usize, m: usize, seed: u64) -> Option<DMatrix<f64>> {
    let mut data: Vec<f64> = Vec::new();
    data.try_reserve_exact(m.checked_mul(n)?).ok()?;
    let mut rng = rng_from_seed(seed);
    data.extend((0..m * n).map(|_| {
        if rand::RngCore::next_u64(&mut rng) >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }));
    Some(DMatrix::from_vec(m, n, data))
}

pub fn bench_sensing(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    if cfg.repetitions == 0 || cfg.m_divisor == 0 {
        return Err(SrmError::Config(
            "repetitions and m_divisor must be at least 1".into(),
        ));
    }
    let min_batch = Duration::from_secs_f64(cfg.min_batch_secs.max(0.0));
    let mut records = Vec::with_capacity(cfg.sizes.len());
    for (i, &n) in cfg.sizes.iter().enumerate() {
        if !n.is_power_of_two() {
            return Err(SrmError::Config(format!(
                "size n={n} is not a power of two"
            )));
        }
        let m = (n / cfg.m_divisor).max(1);
        let seed = derive_seed(cfg.master_seed, &[i as u64]);
        let spec = cfg
            .ensemble
            .srm_spec(n, m, seed, seed ^ 1, false)
            .ok_or_else(|| SrmError::Config("benchmark needs an SRM ensemble".into()))?;
        let op = SrmOperator::new(&spec)?;
        let x: Vec<f64> = (0..n)
            .map(|j| ((j * 7919) % 1000) as f64 / 1000.0 - 0.5)
            .collect();
        op.forward(&x)?;
        let srm_forward_time = median_time(cfg.repetitions, min_batch, || {
            black_box(srm_forward(&op, black_box(&x)).ok());
        });
        let dense_multiply_time = if n <= cfg.dense_cap {
            dense_baseline(n, m, seed).map(|a| {
                let xv = DVector::from_column_slice(&x);
                let mut y = DVector::zeros(m);
                median_time(cfg.repetitions, min_batch, || {
                    y.gemv(1.0, &a, black_box(&xv), 0.0);
                    black_box(&y);
                })
            })
        } else {
            None
        };
        records.push(BenchRecord {
            n,
            m,
            srm_forward_time,
            dense_multiply_time,
            storage_bits_srm: storage_bits_srm(n),
            storage_bits_dense: storage_bits_dense(n, m),
        });
    }
    Ok(records)
}

pub const BENCH_HEADER: &str = "n,m,t_srm_s,t_dense_s,bits_srm,bits_dense";

/// Writes the records; a skipped dense baseline leaves `t_dense_s` empty.
pub fn write_bench_csv(
    out: &mut dyn Write,
    cfg: &BenchConfig,
    records: &[BenchRecord],
) -> Result<()> {
    write_metadata(out, cfg.master_seed, cfg)?;
    writeln!(out, "{BENCH_HEADER}")?;
    for r in records {
        let dense = r
            .dense_multiply_time
            .map(|t| t.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n, r.m, r.srm_forward_time, dense, r.storage_bits_srm, r.storage_bits_dense
        )?;
    }
    Ok(())
}
