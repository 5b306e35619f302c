//! Orthonormal DCT-II and its inverse (DCT-III) via a single complex FFT.
//!
//! Uses the even/odd reordering `v[k] = x[2k]`, `v[n-1-k] = x[2k+1]`, after
//! which `X[k] = Re(exp(-i pi k / 2n) * FFT(v)[k])`. The inverse rebuilds the
//! Hermitian spectrum from `X[k] - i X[n-k]`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Result, SrmError};

/// Precomputed plan for one DCT length.
#[derive(Clone)]
pub struct DctPlan {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    /// `exp(-i pi k / 2n)`
    twiddles: Vec<Complex64>,
    /// orthonormal scale per output index
    scale: Vec<f64>,
}

impl fmt::Debug for DctPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DctPlan").field("n", &self.n).finish()
    }
}

impl DctPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(SrmError::Config("DCT length must be at least 1".into()));
        }
        let mut planner = FftPlanner::new();
        let nf = n as f64;
        let twiddles = (0..n)
            .map(|k| Complex64::from_polar(1.0, -PI * k as f64 / (2.0 * nf)))
            .collect();
        let mut scale = vec![(2.0 / nf).sqrt(); n];
        scale[0] = (1.0 / nf).sqrt();
        Ok(Self {
            n,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
            twiddles,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place orthonormal DCT-II.
    pub fn forward_in_place(&self, x: &mut [f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        let n = self.n;
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n.div_ceil(2) {
            buf[k].re = x[2 * k];
        }
        for k in 0..n / 2 {
            buf[n - 1 - k].re = x[2 * k + 1];
        }
        self.fft.process(&mut buf);
        for k in 0..n {
            x[k] = (self.twiddles[k] * buf[k]).re * self.scale[k];
        }
        Ok(())
    }

    /// In-place orthonormal DCT-III, the transpose (and inverse) of
    /// [`forward_in_place`](Self::forward_in_place).
    pub fn inverse_in_place(&self, c: &mut [f64]) -> Result<()> {
        check_len(self.n, c.len())?;
        let n = self.n;
        let raw: Vec<f64> = c.iter().zip(&self.scale).map(|(v, s)| v / s).collect();
        let mut buf: Vec<Complex64> = (0..n)
            .map(|k| {
                let mirror = if k == 0 { 0.0 } else { raw[n - k] };
                self.twiddles[k].conj() * Complex64::new(raw[k], -mirror)
            })
            .collect();
        self.ifft.process(&mut buf);
        let inv_n = 1.0 / n as f64;
        for k in 0..n.div_ceil(2) {
            c[2 * k] = buf[k].re * inv_n;
        }
        for k in 0..n / 2 {
            c[2 * k + 1] = buf[n - 1 - k].re * inv_n;
        }
        Ok(())
    }
}

/// Orthonormal DCT-II of `v`.
pub fn dct_apply(v: &[f64]) -> Result<Vec<f64>> {
    let plan = DctPlan::new(v.len())?;
    let mut out = v.to_vec();
    plan.forward_in_place(&mut out)?;
    Ok(out)
}

/// Orthonormal DCT-III of `v`; inverse of [`dct_apply`].
pub fn dct_inverse(v: &[f64]) -> Result<Vec<f64>> {
    let plan = DctPlan::new(v.len())?;
    let mut out = v.to_vec();
    plan.inverse_in_place(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Entry (k, n) of the orthonormal DCT-II matrix, straight from the cosine formula.
    fn dct_entry(n_len: usize, k: usize, n: usize) -> f64 {
        let nf = n_len as f64;
        let s = if k == 0 {
            (1.0 / nf).sqrt()
        } else {
            (2.0 / nf).sqrt()
        };
        s * (PI * k as f64 * (2.0 * n as f64 + 1.0) / (2.0 * nf)).cos()
    }

    #[test]
    fn constant_vector_is_dc_only() {
        let c = 1.5;
        let out = dct_apply(&[c; 16]).unwrap();
        assert!((out[0] - c * 4.0).abs() < 1e-12);
        assert!(out[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn delta_columns_match_cosine_matrix() {
        for n_len in [1usize, 2, 3, 5, 8, 12] {
            for j in 0..n_len {
                let mut e = vec![0.0; n_len];
                e[j] = 1.0;
                let col = dct_apply(&e).unwrap();
                for (k, v) in col.iter().enumerate() {
                    assert!(
                        (v - dct_entry(n_len, k, j)).abs() < 1e-12,
                        "n={n_len} k={k} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn round_trip_odd_and_even_lengths() {
        let mut rng = crate::rng::rng_from_seed(11);
        for n in [1usize, 2, 7, 64, 100, 256] {
            let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let back = dct_inverse(&dct_apply(&v).unwrap()).unwrap();
            for (a, b) in back.iter().zip(&v) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inverse_is_transpose() {
        let n = 8;
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let row = dct_inverse(&e).unwrap();
            for (j, v) in row.iter().enumerate() {
                assert!((v - dct_entry(n, i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_rejected() {
        assert!(dct_apply(&[]).is_err());
    }
}
