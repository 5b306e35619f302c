//! Sparse recovery from `y = Phi Psi alpha`.

mod l1;
mod omp;
mod signal;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result};
use crate::linear_map::norm2;

pub use l1::{debias, estimate_lipschitz, solve_l1, solve_lasso, L1Options, LassoResult};
pub use omp::solve_omp;
pub use signal::{generate_sparse_signal, SparseSignal, SparseSignalSpec};

/// Default relative l2 error under which a reconstruction counts as exact.
pub const DEFAULT_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub alpha_hat: Vec<f64>,
    pub iterations: usize,
    /// `||y - A alpha_hat||_2`
    pub residual: f64,
    pub converged: bool,
}

/// JSON summary of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_error: Option<f64>,
}

impl SolveResult {
    pub fn report(&self, truth: Option<&[f64]>) -> SolveReport {
        SolveReport {
            converged: self.converged,
            iterations: self.iterations,
            residual: self.residual,
            rel_error: truth.map(|t| relative_error(&self.alpha_hat, t)),
        }
    }
}

/// `||estimate - truth|| / ||truth||`, or `||estimate||` when the truth is zero.
pub fn relative_error(estimate: &[f64], truth: &[f64]) -> f64 {
    let diff: Vec<f64> = estimate.iter().zip(truth).map(|(a, b)| a - b).collect();
    let nt = norm2(truth);
    if nt == 0.0 {
        norm2(&diff)
    } else {
        norm2(&diff) / nt
    }
}

/// True iff `||alpha_hat - alpha|| <= rel_tol * ||alpha||`; for `alpha = 0`
/// true iff `||alpha_hat|| <= rel_tol`.
pub fn check_exact_recovery(alpha_hat: &[f64], alpha: &[f64], rel_tol: f64) -> Result<bool> {
    check_len(alpha.len(), alpha_hat.len())?;
    let diff: Vec<f64> = alpha_hat.iter().zip(alpha).map(|(a, b)| a - b).collect();
    let na = norm2(alpha);
    Ok(if na == 0.0 {
        norm2(alpha_hat) <= rel_tol
    } else {
        norm2(&diff) <= rel_tol * na
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_recovery_contract() {
        let alpha = vec![3.0, 0.0, -4.0];
        assert!(check_exact_recovery(&alpha, &alpha, 1e-3).unwrap());
        let mut off = alpha.clone();
        off[0] += 0.01 * 5.0;
        assert!(!check_exact_recovery(&off, &alpha, 1e-3).unwrap());
        // perturbation of exactly rel_tol * ||alpha|| (= 0.5 with tol 0.1): boundary is inclusive
        let mut edge = alpha.clone();
        edge[1] = 0.5;
        assert!(check_exact_recovery(&edge, &alpha, 0.1).unwrap());
        assert!(check_exact_recovery(&[0.0, 1e-4], &[0.0, 0.0], 1e-3).unwrap());
        assert!(!check_exact_recovery(&[0.0, 1e-2], &[0.0, 0.0], 1e-3).unwrap());
        assert!(check_exact_recovery(&[0.0], &[0.0, 0.0], 1e-3).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = SolveResult {
            alpha_hat: vec![1.0, 0.0],
            iterations: 12,
            residual: 0.5,
            converged: true,
        };
        let j = serde_json::to_value(r.report(None)).unwrap();
        assert_eq!(
            j,
            serde_json::json!({"converged": true, "iterations": 12, "residual": 0.5})
        );
        let j = serde_json::to_value(r.report(Some(&[2.0, 0.0]))).unwrap();
        assert_eq!(j["rel_error"], 0.5);
    }
}
