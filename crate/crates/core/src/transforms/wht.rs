//! Orthonormal Walsh-Hadamard transform (natural / Hadamard ordering).

use crate::error::{Result, SrmError};

/// In-place normalized WHT: `v <- H v` with `H = H_n / sqrt(n)`.
///
/// The butterfly runs in `n log2 n` additions; the single scaling pass makes
/// every row unit-norm, so the transform is orthonormal and an involution.
pub fn wht_in_place(v: &mut [f64]) -> Result<()> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(SrmError::Config(format!(
            "WHT length must be a power of two, got {n}"
        )));
    }
    let mut half = 1;
    while half < n {
        for chunk in v.chunks_exact_mut(half << 1) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
    if n > 1 {
        let scale = 1.0 / (n as f64).sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
    }
    Ok(())
}

/// Returns `H v` for the orthonormal Walsh-Hadamard matrix `H`.
pub fn wht_apply(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    wht_in_place(&mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_map::norm2;
    use rand::Rng;

    #[test]
    fn delta_maps_to_first_column() {
        let out = wht_apply(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(out, vec![0.5; 4]);
    }

    #[test]
    fn involution_and_energy() {
        let mut rng = crate::rng::rng_from_seed(3);
        let v: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
        let hv = wht_apply(&v).unwrap();
        assert!((norm2(&hv) - norm2(&v)).abs() < 1e-12);
        let back = wht_apply(&hv).unwrap();
        for (a, b) in back.iter().zip(&v) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(wht_apply(&[1.0, 2.0, 3.0]).is_err());
        assert!(wht_apply(&[]).is_err());
    }

    #[test]
    fn matches_sylvester_construction() {
        // H_{2n} = [[H_n, H_n], [H_n, -H_n]]
        let n = 8;
        let sylvester = |i: usize, j: usize| {
            if (i & j).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        };
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            let col = wht_apply(&e).unwrap();
            for (i, c) in col.iter().enumerate() {
                assert!((c - sylvester(i, j) / (n as f64).sqrt()).abs() < 1e-15);
            }
        }
    }
}
