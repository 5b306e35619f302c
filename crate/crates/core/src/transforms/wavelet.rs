//! Orthogonal Daubechies-8 (16-tap, 8 vanishing moments) periodic wavelet transform.
//!
//! Coefficient layout after `levels` analysis steps on a length-`n` signal:
//! `[approx_J | detail_J | detail_{J-1} | ... | detail_1]`, coarsest first.

use crate::error::{Result, SrmError};

/// Daubechies-8 scaling (low-pass) filter, sum = sqrt(2).
pub const DB8_LOWPASS: [f64; 16] = [
    0.054_415_842_243_104_01,
    0.312_871_590_914_299_97,
    0.675_630_736_297_289_8,
    0.585_354_683_654_206_7,
    -0.015_829_105_256_349_306,
    -0.284_015_542_961_546_9,
    0.000_472_484_573_913_282_8,
    0.128_747_426_620_478_46,
    -0.017_369_301_001_807_546,
    -0.044_088_253_930_794_75,
    0.013_981_027_917_398_282,
    0.008_746_094_047_405_777,
    -0.004_870_352_993_451_574,
    -0.000_391_740_373_376_947,
    0.000_675_449_406_450_569_4,
    -0.000_117_476_784_124_769_53,
];

/// Quadrature-mirror high-pass: `g[k] = (-1)^k h[L-1-k]`.
fn highpass() -> [f64; 16] {
    let mut g = [0.0; 16];
    for (k, gk) in g.iter_mut().enumerate() {
        let h = DB8_LOWPASS[15 - k];
        *gk = if k % 2 == 0 { h } else { -h };
    }
    g
}

/// Validates that `n` supports `levels` dyadic splits.
pub fn check_levels(n: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(SrmError::Config("wavelet levels must be at least 1".into()));
    }
    if levels >= usize::BITS as usize || n == 0 || !n.is_multiple_of(1usize << levels) {
        return Err(SrmError::Config(format!(
            "wavelet length {n} is not divisible by 2^{levels}"
        )));
    }
    Ok(())
}

/// Default decomposition depth: the deepest split keeping an approximation
/// band of at least 16 samples, and at least one level.
pub fn default_levels(n: usize) -> usize {
    let mut levels = 0;
    while n.is_multiple_of(1 << (levels + 1)) && n >> (levels + 1) >= 16 {
        levels += 1;
    }
    levels.max(1)
}

fn analysis_step(x: &[f64], out: &mut [f64], g: &[f64; 16]) {
    let len = x.len();
    let half = len / 2;
    for k in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for (t, (h, gt)) in DB8_LOWPASS.iter().zip(g).enumerate() {
            let s = x[(2 * k + t) % len];
            a += h * s;
            d += gt * s;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

fn synthesis_step(c: &[f64], out: &mut [f64], g: &[f64; 16]) {
    let len = c.len();
    let half = len / 2;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in 0..half {
        let (a, d) = (c[k], c[half + k]);
        for (t, (h, gt)) in DB8_LOWPASS.iter().zip(g).enumerate() {
            out[(2 * k + t) % len] += h * a + gt * d;
        }
    }
}

/// Forward (analysis) transform.
pub fn wavelet_analysis(v: &[f64], levels: usize) -> Result<Vec<f64>> {
    check_levels(v.len(), levels)?;
    let g = highpass();
    let mut coeffs = v.to_vec();
    let mut scratch = vec![0.0; v.len()];
    let mut len = v.len();
    for _ in 0..levels {
        analysis_step(&coeffs[..len], &mut scratch[..len], &g);
        coeffs[..len].copy_from_slice(&scratch[..len]);
        len /= 2;
    }
    Ok(coeffs)
}

/// Inverse (synthesis) transform; the transpose of [`wavelet_analysis`].
pub fn wavelet_synthesis(coefficients: &[f64], levels: usize) -> Result<Vec<f64>> {
    check_levels(coefficients.len(), levels)?;
    let g = highpass();
    let mut signal = coefficients.to_vec();
    let mut scratch = vec![0.0; signal.len()];
    let mut len = signal.len() >> levels;
    for _ in 0..levels {
        len *= 2;
        synthesis_step(&signal[..len], &mut scratch[..len], &g);
        signal[..len].copy_from_slice(&scratch[..len]);
    }
    Ok(signal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_map::norm2;
    use nalgebra::DMatrix;
    use rand::Rng;

    #[test]
    fn filter_is_orthonormal_with_vanishing_moments() {
        let h = DB8_LOWPASS;
        let sum: f64 = h.iter().sum();
        assert!((sum - 2f64.sqrt()).abs() < 1e-14);
        for shift in 0..8 {
            let c: f64 = (0..16 - 2 * shift).map(|k| h[k] * h[k + 2 * shift]).sum();
            let expected = if shift == 0 { 1.0 } else { 0.0 };
            assert!((c - expected).abs() < 1e-14, "shift {shift}: {c}");
        }
        let g = highpass();
        for p in 0..8 {
            let moment: f64 = g
                .iter()
                .enumerate()
                .map(|(k, v)| v * (k as f64).powi(p))
                .sum();
            assert!(moment.abs() < 1e-6 * 16f64.powi(p), "moment {p}: {moment}");
        }
    }

    #[test]
    fn perfect_reconstruction_and_energy() {
        let mut rng = crate::rng::rng_from_seed(5);
        let v: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = wavelet_analysis(&v, 4).unwrap();
        assert!((norm2(&c) - norm2(&v)).abs() < 1e-10);
        let back = wavelet_synthesis(&c, 4).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn materialized_single_level_is_orthogonal() {
        let n = 16;
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                wavelet_analysis(&e, 1).unwrap()
            })
            .collect();
        let u = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
        let gram = u.transpose() * &u;
        assert!((gram - DMatrix::identity(n, n)).amax() < 1e-10);
    }

    #[test]
    fn deep_levels_on_short_signals_stay_orthogonal() {
        // the 16-tap filter wraps several times around an 8-sample band
        let mut rng = crate::rng::rng_from_seed(9);
        let v: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = wavelet_analysis(&v, 4).unwrap();
        assert!((norm2(&c) - norm2(&v)).abs() < 1e-12);
        let back = wavelet_synthesis(&c, 4).unwrap();
        assert!(back.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn incompatible_levels_rejected() {
        assert!(wavelet_analysis(&[0.0; 24], 4).is_err());
        assert!(wavelet_analysis(&[0.0; 24], 0).is_err());
        assert!(wavelet_synthesis(&[0.0; 6], 2).is_err());
    }

    #[test]
    fn default_depth() {
        assert_eq!(default_levels(256), 4);
        assert_eq!(default_levels(4096), 8);
        assert_eq!(default_levels(16), 1);
        assert_eq!(default_levels(96), 2);
    }
}
