//! Built-in invariant checks, runnable without the test harness.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::analysis::{cumulative_coherence, mutual_coherence};
use crate::error::Result;
use crate::experiments::{Ensemble, TrialConfig};
use crate::linear_map::{dot, materialize, norm2, IdentityMap, LinearMap};
use crate::operator::SrmOperator;
use crate::randomize::RandomizerKind;
use crate::recovery::{relative_error, solve_l1, solve_omp, L1Options};
use crate::rng::{derive_seed, rng_from_seed};
use crate::transforms::{Basis, Transform, TransformKind, TransformSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: String, outcome: Result<std::result::Result<(), String>>) -> CheckResult {
    let (passed, detail) = match outcome {
        Ok(Ok(())) => (true, String::new()),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, e.to_string()),
    };
    CheckResult {
        name,
        passed,
        detail,
    }
}

fn gaussian_vec(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Ensembles covered by the operator suite at length `n`.
pub fn suite_ensembles(n: usize) -> Vec<Ensemble> {
    let b = (n / 4).max(1);
    vec![
        Ensemble::srm(TransformKind::Wht, None, RandomizerKind::Local),
        Ensemble::srm(TransformKind::Wht, None, RandomizerKind::Global),
        Ensemble::srm(TransformKind::Wht, Some(b), RandomizerKind::Local),
        Ensemble::srm(TransformKind::Wht, Some(b), RandomizerKind::Global),
        Ensemble::srm(TransformKind::Dct, None, RandomizerKind::Local),
        Ensemble::srm(TransformKind::Dct, None, RandomizerKind::Global),
        Ensemble::srm(TransformKind::Dct, Some(b), RandomizerKind::Global),
        Ensemble::GaussianDense,
    ]
}

fn adjoint_and_linearity(phi: &dyn LinearMap, seed: u64) -> std::result::Result<(), String> {
    let (n, m) = (phi.dim_in(), phi.dim_out());
    let x = gaussian_vec(n, seed);
    let z = gaussian_vec(n, seed ^ 0x55);
    let y = gaussian_vec(m, seed ^ 0xaa);
    let fx = phi.forward(&x).map_err(|e| e.to_string())?;
    let ay = phi.adjoint(&y).map_err(|e| e.to_string())?;
    let lhs = dot(&fx, &y);
    let rhs = dot(&x, &ay);
    let scale = norm2(&fx) * norm2(&y) + norm2(&x) * norm2(&ay);
    if (lhs - rhs).abs() > 1e-10 * scale {
        return Err(format!("adjoint mismatch {lhs} vs {rhs}"));
    }
    let (a, b) = (1.7, -0.3);
    let comb: Vec<f64> = x.iter().zip(&z).map(|(p, q)| a * p + b * q).collect();
    let lhs = phi.forward(&comb).map_err(|e| e.to_string())?;
    let fz = phi.forward(&z).map_err(|e| e.to_string())?;
    let rhs: Vec<f64> = fx.iter().zip(&fz).map(|(p, q)| a * p + b * q).collect();
    let err: f64 = lhs
        .iter()
        .zip(&rhs)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    if err > 1e-10 * (1.0 + norm2(&rhs)) {
        return Err(format!("linearity violated by {err}"));
    }
    Ok(())
}

/// `sqrt(N/M) D (F R)` assembled from materialized components.
fn explicit_srm(op: &SrmOperator) -> Result<DMatrix<f64>> {
    let fr = materialize(op.transform())? * materialize(op.randomizer())?;
    let rows: Vec<usize> = op.subsample().omega.clone();
    Ok(fr.select_rows(rows.iter()) * op.scale())
}

/// Adjoint consistency, linearity, orthonormality of `F R` and
/// materialized-vs-functional equivalence for every ensemble.
pub fn operator_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [16usize, 32, 64] {
        for m in [n / 4, n / 2, n] {
            for (ei, ens) in suite_ensembles(n).into_iter().enumerate() {
                for s in 0..3u64 {
                    let rseed = derive_seed(0x5e1f, &[n as u64, m as u64, ei as u64, s]);
                    let sseed = rseed ^ 0xdead_beef;
                    let label = format!("{ens} n={n} m={m} seed={s}");
                    let include_dc = s == 2;
                    let phi = match ens.build(n, m, rseed, sseed, include_dc) {
                        Ok(p) => p,
                        Err(e) => {
                            out.push(check(format!("build {label}"), Err(e)));
                            continue;
                        }
                    };
                    out.push(check(
                        format!("adjoint/linearity {label}"),
                        Ok(adjoint_and_linearity(phi.as_ref(), rseed)),
                    ));
                    let Some(spec) = ens.srm_spec(n, m, rseed, sseed, include_dc) else {
                        continue;
                    };
                    out.push(check(
                        format!("materialized {label}"),
                        (|| {
                            let op = SrmOperator::new(&spec)?;
                            let functional = materialize(&op)?;
                            let explicit = explicit_srm(&op)?;
                            let adj = crate::linear_map::materialize_adjoint(&op)?;
                            let d = max_abs_diff(&functional, &explicit)
                                .max(max_abs_diff(&adj, &functional.transpose()));
                            Ok(if d <= 1e-12 {
                                Ok(())
                            } else {
                                Err(format!("max deviation {d}"))
                            })
                        })(),
                    ));
                    if m == n {
                        out.push(check(
                            format!("orthonormal F R {label}"),
                            (|| {
                                let op = SrmOperator::new(&spec)?;
                                let fr =
                                    materialize(op.transform())? * materialize(op.randomizer())?;
                                let d =
                                    max_abs_diff(&(fr.transpose() * &fr), &DMatrix::identity(n, n));
                                Ok(if d <= 1e-10 {
                                    Ok(())
                                } else {
                                    Err(format!("|A^T A - I| = {d}"))
                                })
                            })(),
                        ));
                    }
                }
            }
        }
    }
    out
}

fn transform_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for kind in [
        TransformKind::Wht,
        TransformKind::Dct,
        TransformKind::Identity,
        TransformKind::Db8Wavelet,
    ] {
        for (n, b) in [(64usize, 64usize), (64, 16), (128, 32)] {
            let b = if kind == TransformKind::Db8Wavelet {
                n
            } else {
                b
            };
            out.push(check(
                format!("perfect reconstruction {} n={n} b={b}", kind.name()),
                (|| {
                    let t = Transform::new(TransformSpec::block(kind, n, b))?;
                    let x = gaussian_vec(n, n as u64 + b as u64);
                    let back = t.adjoint(&t.forward(&x)?)?;
                    let err = relative_error(&back, &x);
                    let energy = (norm2(&t.forward(&x)?) - norm2(&x)).abs();
                    Ok(if err < 1e-12 && energy < 1e-10 {
                        Ok(())
                    } else {
                        Err(format!("rel error {err}, energy drift {energy}"))
                    })
                })(),
            ));
        }
    }
    out
}

fn coherence_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [16usize, 64, 256] {
        out.push(check(
            format!("mu(WHT, I) = 1/sqrt(N) n={n}"),
            (|| {
                let t = Transform::new(TransformSpec::full(TransformKind::Wht, n))?;
                let r = mutual_coherence(&t, &IdentityMap(n))?;
                let mu_c = cumulative_coherence(&t, &IdentityMap(n), &[0, 1, 2, 3])?;
                let want = 1.0 / (n as f64).sqrt();
                Ok(
                    if (r.mu - want).abs() < 1e-12 && (mu_c - 2.0 * want).abs() < 1e-12 {
                        Ok(())
                    } else {
                        Err(format!("mu={} mu_c={mu_c}", r.mu))
                    },
                )
            })(),
        ));
    }
    out
}

fn recovery_suite() -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(check(
        "l1 and omp recover a 4-sparse signal from 32 of 64".into(),
        (|| {
            let mut cfg = TrialConfig::new(64, 32, 4, "wht64-l".parse()?, TransformKind::Identity);
            cfg.master_seed = 2024;
            let basis = TransformSpec::full(TransformKind::Identity, 64);
            let signal =
                crate::recovery::generate_sparse_signal(&crate::recovery::SparseSignalSpec {
                    n: 64,
                    k: 4,
                    basis,
                    seed: cfg.seed(0, crate::rng::Stream::Signal),
                })?;
            let phi = cfg.ensemble.build(
                64,
                32,
                cfg.seed(0, crate::rng::Stream::Randomizer),
                cfg.seed(0, crate::rng::Stream::Subsample),
                false,
            )?;
            let y = phi.forward(&signal.x)?;
            let a = crate::operator::compose(phi, Basis::new(basis)?)?;
            let l1 = solve_l1(&a, &y, &L1Options::default())?;
            let omp = solve_omp(&a, &y, 8, 1e-10)?;
            let e1 = relative_error(&l1.alpha_hat, &signal.alpha);
            let e2 = relative_error(&omp.alpha_hat, &signal.alpha);
            Ok(if e1 <= 1e-3 && e2 <= 1e-3 && l1.converged {
                Ok(())
            } else {
                Err(format!("l1 error {e1}, omp error {e2}"))
            })
        })(),
    ));
    out.push(check(
        "trial outcomes are deterministic".into(),
        (|| {
            let mut cfg = TrialConfig::new(64, 24, 6, "dct16-g".parse()?, TransformKind::Dct);
            cfg.trials = 8;
            let a = crate::experiments::run_trials(&cfg)?;
            let b = crate::experiments::run_trials(&cfg)?;
            Ok(if a == b {
                Ok(())
            } else {
                Err("outcomes differ".into())
            })
        })(),
    ));
    out
}

/// Every suite: operators, transforms, coherence and recovery.
pub fn run_selftest() -> Vec<CheckResult> {
    let mut all = operator_suite();
    all.extend(transform_suite());
    all.extend(coherence_suite());
    all.extend(recovery_suite());
    all
}
