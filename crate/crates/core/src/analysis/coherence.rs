use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};
use crate::linear_map::{materialize, LinearMap, DEFAULT_MATERIALIZE_CAP};

/// Entries of `S` are kept in the report up to this dimension.
const KEEP_ENTRIES_UP_TO: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    /// `max |<A_i, Psi_j>|`
    pub mu: f64,
    /// `sqrt(N) * mu`
    pub mu_n: f64,
    /// Cumulative coherence over a support, when one was supplied.
    pub mu_c: Option<f64>,
    /// Rows of `A`.
    pub rows: usize,
    /// Signal dimension `N` (columns of `Psi`).
    pub n: usize,
    #[serde(skip)]
    pub entries: Option<DMatrix<f64>>,
}

fn check_pair(a: &dyn LinearMap, psi: &dyn LinearMap) -> Result<usize> {
    let n = psi.dim_in();
    if psi.dim_out() != a.dim_in() {
        return Err(SrmError::Config(format!(
            "A has {} columns but Psi has {} rows",
            a.dim_in(),
            psi.dim_out()
        )));
    }
    if n > DEFAULT_MATERIALIZE_CAP || a.dim_in() > DEFAULT_MATERIALIZE_CAP {
        return Err(SrmError::Size {
            dim: n.max(a.dim_in()),
            cap: DEFAULT_MATERIALIZE_CAP,
        });
    }
    Ok(n)
}

/// Materializes `S = A Psi` and reports `mu = max |S_ij|` and `mu_n = sqrt(N) mu`.
pub fn mutual_coherence(a: &dyn LinearMap, psi: &dyn LinearMap) -> Result<CoherenceReport> {
    let n = check_pair(a, psi)?;
    let s = materialize(a)? * materialize(psi)?;
    let mu = s.amax();
    Ok(CoherenceReport {
        mu,
        mu_n: (n as f64).sqrt() * mu,
        mu_c: None,
        rows: s.nrows(),
        n,
        entries: (n <= KEEP_ENTRIES_UP_TO).then_some(s),
    })
}

/// `max_i sqrt(sum_{j in T} <A_i, Psi_j>^2)`.
pub fn cumulative_coherence(
    a: &dyn LinearMap,
    psi: &dyn LinearMap,
    support: &[usize],
) -> Result<f64> {
    let n = check_pair(a, psi)?;
    if support.is_empty() {
        return Err(SrmError::Config("support must be nonempty".into()));
    }
    let mut seen = vec![false; n];
    for &j in support {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(SrmError::Config(format!(
                "support index {j} is out of range or repeated"
            )));
        }
    }
    let mut row_energy = vec![0.0; a.dim_out()];
    for &j in support {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = a.forward(&psi.forward(&e)?)?;
        row_energy
            .iter_mut()
            .zip(&col)
            .for_each(|(acc, v)| *acc += v * v);
    }
    Ok(row_energy.iter().fold(0.0f64, |m, v| m.max(*v)).sqrt())
}

/// Per-column heterogeneity of a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneityReport {
    /// `rho_k = max|Psi_ik| / sqrt(mean over nonzeros of Psi_ik^2)`
    pub rho_per_column: Vec<f64>,
    /// `max_k rho_k`
    pub rho_psi: f64,
    /// `|T_k|`, the number of nonzero entries of column `k`
    pub support_sizes: Vec<usize>,
}

/// Entries below this fraction of the column's largest magnitude count as zero.
const ZERO_REL: f64 = 1e-12;

pub fn heterogeneity(psi: &dyn LinearMap) -> Result<HeterogeneityReport> {
    let m = materialize(psi)?;
    heterogeneity_of_matrix(&m)
}

pub fn heterogeneity_of_matrix(m: &DMatrix<f64>) -> Result<HeterogeneityReport> {
    let mut rho_per_column = Vec::with_capacity(m.ncols());
    let mut support_sizes = Vec::with_capacity(m.ncols());
    for (k, col) in m.column_iter().enumerate() {
        let peak = col.amax();
        if peak == 0.0 {
            return Err(SrmError::ZeroColumn(k));
        }
        let nonzero: Vec<f64> = col
            .iter()
            .copied()
            .filter(|v| v.abs() > ZERO_REL * peak)
            .collect();
        let mean_sq = nonzero.iter().map(|v| v * v).sum::<f64>() / nonzero.len() as f64;
        rho_per_column.push(peak / mean_sq.sqrt());
        support_sizes.push(nonzero.len());
    }
    let rho_psi = rho_per_column.iter().fold(0.0f64, |a, b| a.max(*b));
    Ok(HeterogeneityReport {
        rho_per_column,
        rho_psi,
        support_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_map::IdentityMap;
    use crate::operator::{RandomizerJson, SrmSpec, SubsampleJson, TransformJson};
    use crate::randomize::RandomizerKind;
    use crate::rng::rng_from_seed;
    use crate::transforms::{Basis, Transform, TransformKind, TransformSpec};
    use crate::DenseMap;
    use rand::Rng;

    fn t(kind: TransformKind, n: usize) -> Transform {
        Transform::new(TransformSpec::full(kind, n)).unwrap()
    }

    #[test]
    fn coincident_bases() {
        let r = mutual_coherence(&IdentityMap(16), &IdentityMap(16)).unwrap();
        assert_eq!(r.mu, 1.0);
        assert_eq!(r.mu_n, 4.0);
    }

    #[test]
    fn hadamard_is_maximally_incoherent_with_spikes() {
        let r = mutual_coherence(&t(TransformKind::Wht, 16), &IdentityMap(16)).unwrap();
        assert!((r.mu - 0.25).abs() < 1e-15);
        assert!((r.mu_n - 1.0).abs() < 1e-14);
        assert!(r.entries.is_some());
    }

    #[test]
    fn dct_against_spikes() {
        // max entry of the orthonormal DCT-II matrix, brute force over the cosine formula
        let n = 16usize;
        let mut oracle = 0.0f64;
        for k in 0..n {
            for j in 0..n {
                let s = if k == 0 {
                    (1.0 / n as f64).sqrt()
                } else {
                    (2.0 / n as f64).sqrt()
                };
                let v = s
                    * (std::f64::consts::PI * k as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos();
                oracle = oracle.max(v.abs());
            }
        }
        let r = mutual_coherence(&t(TransformKind::Dct, n), &IdentityMap(n)).unwrap();
        assert!((r.mu - oracle).abs() < 1e-12);
        assert!(r.mu <= (2.0f64 / 16.0).sqrt() && r.mu > 0.99 * (2.0f64 / 16.0).sqrt());
    }

    #[test]
    fn cumulative_coherence_oracles() {
        assert_eq!(
            cumulative_coherence(&IdentityMap(16), &IdentityMap(16), &[0, 3, 9]).unwrap(),
            1.0
        );
        let mu_c =
            cumulative_coherence(&t(TransformKind::Wht, 16), &IdentityMap(16), &[1, 4, 7, 12])
                .unwrap();
        assert!((mu_c - 0.5).abs() < 1e-15);
        assert!(cumulative_coherence(&IdentityMap(4), &IdentityMap(4), &[]).is_err());
        assert!(cumulative_coherence(&IdentityMap(4), &IdentityMap(4), &[1, 1]).is_err());
        assert!(cumulative_coherence(&IdentityMap(4), &IdentityMap(4), &[4]).is_err());
    }

    #[test]
    fn coherence_bounds_on_random_draws() {
        let n = 64;
        let mut rng = rng_from_seed(77);
        let psi = Basis::new(TransformSpec::full(TransformKind::Db8Wavelet, n)).unwrap();
        for draw in 0..100u64 {
            let spec = SrmSpec {
                n,
                m: n,
                transform: TransformJson {
                    kind: TransformKind::Dct,
                    block: [8, 16, 64][draw as usize % 3],
                    levels: None,
                },
                randomizer: RandomizerJson {
                    kind: if draw % 2 == 0 {
                        RandomizerKind::Local
                    } else {
                        RandomizerKind::Global
                    },
                    seed: draw,
                },
                subsample: SubsampleJson {
                    seed: draw,
                    include_dc: false,
                },
            };
            let a = spec.build().unwrap();
            let report = mutual_coherence(&a, &psi).unwrap();
            assert!(report.mu >= 1.0 / (n as f64).sqrt() - 1e-10);
            assert!(report.mu <= 1.0 + 1e-10);
            let k = rng.random_range(1..=16usize);
            let mut support: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.random_range(i..n);
                support.swap(i, j);
            }
            support.truncate(k);
            let mu_c = cumulative_coherence(&a, &psi, &support).unwrap();
            assert!(mu_c <= (k as f64).sqrt() * report.mu + 1e-10);
        }
    }

    #[test]
    fn heterogeneity_oracles() {
        let id = heterogeneity(&IdentityMap(8)).unwrap();
        assert_eq!(id.rho_psi, 1.0);
        assert!(id.support_sizes.iter().all(|&s| s == 1));
        let wht = heterogeneity(&t(TransformKind::Wht, 16)).unwrap();
        assert!((wht.rho_psi - 1.0).abs() < 1e-12);

        let mut m = DMatrix::identity(6, 6);
        m[(0, 0)] = 0.8f64.sqrt();
        m[(1, 0)] = 0.1f64.sqrt();
        m[(2, 0)] = 0.1f64.sqrt();
        let r = heterogeneity(&DenseMap(m)).unwrap();
        assert!((r.rho_per_column[0] - 2.4f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.support_sizes[0], 3);
    }

    #[test]
    fn heterogeneity_bounds_hold() {
        for kind in [TransformKind::Dct, TransformKind::Db8Wavelet] {
            let r = heterogeneity(&Basis::new(TransformSpec::full(kind, 128)).unwrap()).unwrap();
            for (rho, s) in r.rho_per_column.iter().zip(&r.support_sizes) {
                assert!(*rho >= 1.0 - 1e-12 && *rho <= (*s as f64).sqrt() + 1e-12);
            }
        }
    }

    #[test]
    fn zero_column_named() {
        let mut m = DMatrix::identity(4, 4);
        m[(2, 2)] = 0.0;
        assert!(matches!(
            heterogeneity(&DenseMap(m)),
            Err(SrmError::ZeroColumn(2))
        ));
    }
}
