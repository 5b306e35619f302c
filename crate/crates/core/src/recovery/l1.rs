//! l1-regularized least squares, `min 0.5 ||y - A a||^2 + tau ||a||_1`, by a
//! monotone accelerated proximal-gradient iteration with continuation on
//! `tau`, followed by a least-squares refit on the detected support.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SrmError};
use crate::linear_map::{dot, norm2, LinearMap};
use crate::rng::rng_from_seed;

use super::SolveResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Options {
    /// Absolute regularization weight; overrides `tau_rel` when set.
    pub tau: Option<f64>,
    /// Target `tau` as a fraction of `||A^T y||_inf`.
    pub tau_rel: f64,
    /// Geometric factor between continuation stages, in (0, 1).
    pub continuation: f64,
    /// Relative objective change that ends a stage.
    pub tol: f64,
    /// Iteration budget shared by all stages.
    pub max_iter: usize,
    pub debias: bool,
    pub debias_max_iter: usize,
}

impl Default for L1Options {
    fn default() -> Self {
        Self {
            tau: None,
            tau_rel: 1e-4,
            continuation: 0.5,
            tol: 1e-9,
            max_iter: 10_000,
            debias: true,
            debias_max_iter: 50,
        }
    }
}

impl L1Options {
    fn validate(&self) -> Result<()> {
        if let Some(t) = self.tau {
            if t.is_nan() || t <= 0.0 {
                return Err(SrmError::Config(format!("tau must be positive, got {t}")));
            }
        }
        if self.tau_rel.is_nan() || self.tau_rel <= 0.0 || self.tol.is_nan() || self.tol <= 0.0 {
            return Err(SrmError::Config("tau_rel and tol must be positive".into()));
        }
        if !(self.continuation > 0.0 && self.continuation < 1.0) {
            return Err(SrmError::Config(format!(
                "continuation factor must lie in (0, 1), got {}",
                self.continuation
            )));
        }
        Ok(())
    }
}

/// Output of the shrinkage phase, before any refit.
#[derive(Debug, Clone)]
pub struct LassoResult {
    pub alpha: Vec<f64>,
    pub tau: f64,
    pub iterations: usize,
    pub converged: bool,
    pub lipschitz: f64,
    /// Objective of the accepted iterate after every iteration, evaluated at
    /// the `tau` in force at that iteration.
    pub objective_trace: Vec<f64>,
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

fn objective(residual_sq_half: f64, tau: f64, alpha: &[f64]) -> f64 {
    residual_sq_half + tau * alpha.iter().map(|v| v.abs()).sum::<f64>()
}

fn half_sq_dist(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>()
}

/// Largest eigenvalue of `A^T A` by power iteration from a fixed start.
pub fn estimate_lipschitz(a: &dyn LinearMap, iterations: usize) -> Result<f64> {
    let mut rng = rng_from_seed(0x5EED_1F5E);
    let mut v: Vec<f64> = (0..a.dim_in())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let nv = norm2(&v);
        if nv == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().for_each(|x| *x /= nv);
        let w = a.adjoint(&a.forward(&v)?)?;
        let next = dot(&v, &w);
        let settled = (next - lambda).abs() <= 1e-10 * next.abs();
        lambda = next;
        v = w;
        if settled {
            break;
        }
    }
    Ok(lambda)
}

/// Shrinkage phase only: returns the (approximate) LASSO minimizer at the
/// target `tau`.
pub fn solve_lasso(a: &dyn LinearMap, y: &[f64], opts: &L1Options) -> Result<LassoResult> {
    opts.validate()?;
    check_len(a.dim_out(), y.len())?;
    let n = a.dim_in();
    let aty = a.adjoint(y)?;
    let aty_inf = aty.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tau_target = opts.tau.unwrap_or(opts.tau_rel * aty_inf);
    if aty_inf == 0.0 || tau_target >= aty_inf {
        // zero is optimal: ||A^T y||_inf <= tau
        let f0 = half_sq_dist(y, &vec![0.0; y.len()]);
        return Ok(LassoResult {
            alpha: vec![0.0; n],
            tau: tau_target,
            iterations: 0,
            converged: true,
            lipschitz: 0.0,
            objective_trace: vec![f0],
        });
    }

    let mut lip = estimate_lipschitz(a, 100)? * 1.02;
    if lip.is_nan() || lip <= 0.0 || !lip.is_finite() {
        return Err(SrmError::Numerical(format!(
            "invalid Lipschitz estimate {lip}"
        )));
    }

    let mut tau = (aty_inf * opts.continuation).max(tau_target);
    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; y.len()];
    let mut yk = x.clone();
    let mut ayk = ax.clone();
    let mut t = 1.0f64;
    let mut fx = objective(half_sq_dist(&ax, y), tau, &x);
    let mut fresh_restart = true;
    let mut trace = Vec::with_capacity(opts.max_iter.min(4096));
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let resid: Vec<f64> = ayk.iter().zip(y).map(|(p, q)| p - q).collect();
        let grad = a.adjoint(&resid)?;
        let step = 1.0 / lip;
        let z: Vec<f64> = yk
            .iter()
            .zip(&grad)
            .map(|(v, g)| soft_threshold(v - step * g, step * tau))
            .collect();
        let az = a.forward(&z)?;
        let fz = objective(half_sq_dist(&az, y), tau, &z);

        if fz <= fx {
            let decrease = fx - fz;
            let x_prev = std::mem::replace(&mut x, z);
            let ax_prev = std::mem::replace(&mut ax, az);
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            t = t_next;
            yk = x
                .iter()
                .zip(&x_prev)
                .map(|(c, p)| c + beta * (c - p))
                .collect();
            ayk = ax
                .iter()
                .zip(&ax_prev)
                .map(|(c, p)| c + beta * (c - p))
                .collect();
            fx = fz;
            fresh_restart = false;
            trace.push(fx);

            if decrease <= opts.tol * fx.max(f64::MIN_POSITIVE) {
                if tau <= tau_target {
                    converged = true;
                    break;
                }
                tau = (tau * opts.continuation).max(tau_target);
                fx = objective(half_sq_dist(&ax, y), tau, &x);
                t = 1.0;
                yk.clone_from(&x);
                ayk.clone_from(&ax);
            }
        } else {
            if fresh_restart {
                // a plain proximal step from the accepted point must not
                // increase the objective unless the step is too long
                lip *= 2.0;
            }
            t = 1.0;
            yk.clone_from(&x);
            ayk.clone_from(&ax);
            fresh_restart = true;
            trace.push(fx);
        }
    }

    Ok(LassoResult {
        alpha: x,
        tau,
        iterations,
        converged,
        lipschitz: lip,
        objective_trace: trace,
    })
}

/// Least-squares refit of `alpha` restricted to its nonzero entries, by CGLS
/// warm-started at `alpha`.
pub fn debias(a: &dyn LinearMap, y: &[f64], alpha: &[f64], max_iter: usize) -> Result<Vec<f64>> {
    let n = a.dim_in();
    let support: Vec<usize> = (0..n).filter(|&i| alpha[i] != 0.0).collect();
    if support.is_empty() {
        return Ok(alpha.to_vec());
    }
    let embed = |v: &[f64]| {
        let mut full = vec![0.0; n];
        for (&i, &x) in support.iter().zip(v) {
            full[i] = x;
        }
        full
    };
    let restrict = |full: &[f64]| support.iter().map(|&i| full[i]).collect::<Vec<f64>>();

    let mut xs = restrict(alpha);
    let ax = a.forward(alpha)?;
    let mut r: Vec<f64> = y.iter().zip(&ax).map(|(p, q)| p - q).collect();
    let mut s = restrict(&a.adjoint(&r)?);
    let mut p = s.clone();
    let mut gamma = dot(&s, &s);
    let stop = 1e-24 * dot(&restrict(&a.adjoint(y)?), &restrict(&a.adjoint(y)?)).max(1e-300);
    for _ in 0..max_iter {
        if gamma <= stop {
            break;
        }
        let q = a.forward(&embed(&p))?;
        let delta = dot(&q, &q);
        if delta <= 0.0 {
            break;
        }
        let step = gamma / delta;
        xs.iter_mut().zip(&p).for_each(|(x, d)| *x += step * d);
        r.iter_mut().zip(&q).for_each(|(v, d)| *v -= step * d);
        s = restrict(&a.adjoint(&r)?);
        let gamma_next = dot(&s, &s);
        let beta = gamma_next / gamma;
        p.iter_mut().zip(&s).for_each(|(d, g)| *d = g + beta * *d);
        gamma = gamma_next;
    }
    Ok(embed(&xs))
}

/// Sparse recovery from `y = A alpha`: shrinkage with continuation, then a
/// debiasing refit on the detected support. Non-convergence is reported
/// through `converged = false` with the best iterate.
pub fn solve_l1(a: &dyn LinearMap, y: &[f64], opts: &L1Options) -> Result<SolveResult> {
    let lasso = solve_lasso(a, y, opts)?;
    let alpha_hat = if opts.debias {
        let refit = debias(a, y, &lasso.alpha, opts.debias_max_iter)?;
        let before = norm2(&residual(a, y, &lasso.alpha)?);
        let after = norm2(&residual(a, y, &refit)?);
        if after <= before || !before.is_finite() {
            refit
        } else {
            lasso.alpha
        }
    } else {
        lasso.alpha
    };
    let res = norm2(&residual(a, y, &alpha_hat)?);
    Ok(SolveResult {
        alpha_hat,
        iterations: lasso.iterations,
        residual: res,
        converged: lasso.converged,
    })
}

pub(crate) fn residual(a: &dyn LinearMap, y: &[f64], alpha: &[f64]) -> Result<Vec<f64>> {
    let ax = a.forward(alpha)?;
    Ok(y.iter().zip(&ax).map(|(p, q)| p - q).collect())
}
