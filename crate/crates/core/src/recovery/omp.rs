//! Orthogonal Matching Pursuit.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Result, SrmError};
use crate::linear_map::{norm2, LinearMap};

use super::SolveResult;

const RIDGE: f64 = 1e-12;

/// Greedy max-correlation atom selection with a least-squares refit on the
/// growing support. Stops after `k_max` atoms or once the residual norm is
/// at most `residual_tol`.
pub fn solve_omp(
    a: &dyn LinearMap,
    y: &[f64],
    k_max: usize,
    residual_tol: f64,
) -> Result<SolveResult> {
    let (n, m) = (a.dim_in(), a.dim_out());
    check_len(m, y.len())?;
    if k_max > m {
        return Err(SrmError::Config(format!(
            "k_max={k_max} exceeds the number of measurements {m}"
        )));
    }
    let yv = DVector::from_column_slice(y);
    let mut support: Vec<usize> = Vec::new();
    let mut atoms: Vec<Vec<f64>> = Vec::new();
    let mut coeffs = DVector::<f64>::zeros(0);
    let mut r = y.to_vec();
    let mut iterations = 0;

    while support.len() < k_max && norm2(&r) > residual_tol {
        let corr = a.adjoint(&r)?;
        let best = corr
            .iter()
            .enumerate()
            .filter(|(i, _)| !support.contains(i))
            .max_by(|p, q| p.1.abs().total_cmp(&q.1.abs()));
        let Some((j, c)) = best else { break };
        if *c == 0.0 {
            break;
        }
        iterations += 1;
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        atoms.push(a.forward(&e)?);
        support.push(j);

        let k = support.len();
        let cols = DMatrix::from_fn(m, k, |i, c| atoms[c][i]);
        let gram = cols.tr_mul(&cols);
        let rhs = cols.tr_mul(&yv);
        coeffs = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => {
                let scale = gram.diagonal().max().max(1.0);
                let ridged = gram + DMatrix::identity(k, k) * (RIDGE * scale);
                ridged
                    .cholesky()
                    .ok_or_else(|| SrmError::Numerical("singular OMP normal equations".into()))?
                    .solve(&rhs)
            }
        };
        let fit = &cols * &coeffs;
        r = y.iter().zip(fit.iter()).map(|(p, q)| p - q).collect();
    }

    let mut alpha_hat = vec![0.0; n];
    for (&i, &c) in support.iter().zip(coeffs.iter()) {
        alpha_hat[i] = c;
    }
    let residual = norm2(&r);
    Ok(SolveResult {
        alpha_hat,
        iterations,
        residual,
        converged: residual <= residual_tol,
    })
}
