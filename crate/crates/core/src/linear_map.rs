//! Matrix-free linear operators.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{check_len, Result, SrmError};

/// Largest dimension [`materialize`] will build by default.
pub const DEFAULT_MATERIALIZE_CAP: usize = 4096;

/// A real linear map with a fast forward and adjoint application.
///
/// Implementations must satisfy `<forward(x), y> = <x, adjoint(y)>`.
pub trait LinearMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>>;
}

impl<T: LinearMap + ?Sized> LinearMap for Box<T> {
    fn dim_in(&self) -> usize {
        (**self).dim_in()
    }
    fn dim_out(&self) -> usize {
        (**self).dim_out()
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).forward(x)
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        (**self).adjoint(y)
    }
}

impl<T: LinearMap + ?Sized> LinearMap for Arc<T> {
    fn dim_in(&self) -> usize {
        (**self).dim_in()
    }
    fn dim_out(&self) -> usize {
        (**self).dim_out()
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).forward(x)
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        (**self).adjoint(y)
    }
}

/// Identity on R^n.
#[derive(Debug, Clone, Copy)]
pub struct IdentityMap(pub usize);

impl LinearMap for IdentityMap {
    fn dim_in(&self) -> usize {
        self.0
    }
    fn dim_out(&self) -> usize {
        self.0
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.0, x.len())?;
        Ok(x.to_vec())
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.0, y.len())?;
        Ok(y.to_vec())
    }
}

/// An explicitly stored matrix.
#[derive(Debug, Clone)]
pub struct DenseMap(pub DMatrix<f64>);

impl LinearMap for DenseMap {
    fn dim_in(&self) -> usize {
        self.0.ncols()
    }
    fn dim_out(&self) -> usize {
        self.0.nrows()
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.0.ncols(), x.len())?;
        let x = DVector::from_column_slice(x);
        Ok((&self.0 * x).data.into())
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.0.nrows(), y.len())?;
        let y = DVector::from_column_slice(y);
        Ok(self.0.tr_mul(&y).data.into())
    }
}

fn unit(n: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[j] = 1.0;
    e
}

/// Dense matrix whose column `j` is `map.forward(e_j)`, with the default cap.
pub fn materialize(map: &dyn LinearMap) -> Result<DMatrix<f64>> {
    materialize_with_cap(map, DEFAULT_MATERIALIZE_CAP)
}

pub fn materialize_with_cap(map: &dyn LinearMap, cap: usize) -> Result<DMatrix<f64>> {
    let (n, m) = (map.dim_in(), map.dim_out());
    if n > cap {
        return Err(SrmError::Size { dim: n, cap });
    }
    let cols = (0..n)
        .into_par_iter()
        .map(|j| map.forward(&unit(n, j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(m, n, |i, j| cols[j][i]))
}

/// Dense matrix of the adjoint: column `i` is `map.adjoint(e_i)`.
pub fn materialize_adjoint(map: &dyn LinearMap) -> Result<DMatrix<f64>> {
    let (n, m) = (map.dim_in(), map.dim_out());
    if m > DEFAULT_MATERIALIZE_CAP {
        return Err(SrmError::Size {
            dim: m,
            cap: DEFAULT_MATERIALIZE_CAP,
        });
    }
    let cols = (0..m)
        .into_par_iter()
        .map(|i| map.adjoint(&unit(m, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(n, m, |r, c| cols[c][r]))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
