use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};
use crate::linear_map::LinearMap;
use crate::randomize::fisher_yates;
use crate::rng::rng_from_seed;
use crate::transforms::{Basis, TransformSpec};

/// Ground-truth generator: `K` nonzero coefficients at uniformly random
/// positions, fair random signs and `|N(0,1)|` magnitudes, synthesized
/// through the basis `Psi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSignalSpec {
    pub n: usize,
    pub k: usize,
    pub basis: TransformSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub x: Vec<f64>,
    pub alpha: Vec<f64>,
    /// sorted support indices
    pub support: Vec<usize>,
    /// sign and magnitude per support index, in support order
    pub signs: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

pub fn generate_sparse_signal(spec: &SparseSignalSpec) -> Result<SparseSignal> {
    if spec.k > spec.n {
        return Err(SrmError::Config(format!(
            "sparsity k={} exceeds length n={}",
            spec.k, spec.n
        )));
    }
    if spec.basis.signal_length != spec.n {
        return Err(SrmError::Config(format!(
            "basis length {} does not match n={}",
            spec.basis.signal_length, spec.n
        )));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut support: Vec<usize> = fisher_yates(spec.n, &mut rng)
        .into_iter()
        .take(spec.k)
        .collect();
    support.sort_unstable();
    let signs: Vec<f64> = (0..spec.k)
        .map(|_| if rng.next_u64() >> 63 == 0 { 1.0 } else { -1.0 })
        .collect();
    let magnitudes: Vec<f64> = (0..spec.k)
        .map(|_| {
            let v: f64 = StandardNormal.sample(&mut rng);
            v.abs()
        })
        .collect();
    let mut alpha = vec![0.0; spec.n];
    for ((&i, s), m) in support.iter().zip(&signs).zip(&magnitudes) {
        alpha[i] = s * m;
    }
    let x = Basis::new(spec.basis)?.forward(&alpha)?;
    Ok(SparseSignal {
        x,
        alpha,
        support,
        signs,
        magnitudes,
    })
}
