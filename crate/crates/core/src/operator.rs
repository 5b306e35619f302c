//! The structurally random sensing operator `Phi = sqrt(N/M) D F R`, its
//! adjoint, and its composition with a sparsifying basis.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SrmError};
use crate::linear_map::{materialize, LinearMap};
use crate::randomize::{
    build_randomizer, fisher_yates, Randomizer, RandomizerKind, RandomizerSpec,
};
use crate::rng::rng_from_seed;
use crate::transforms::{Transform, TransformKind, TransformSpec};

/// Row selection `D`: an exactly-`M` subset of `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsampleSet {
    pub omega: Vec<usize>,
    pub include_dc: bool,
    pub seed: u64,
}

impl SubsampleSet {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// Draws `m` distinct indices from `0..n` uniformly (Fisher-Yates prefix of
/// a seeded shuffle). With `include_dc` index 0 is forced in and the other
/// `m - 1` come from `1..n`.
pub fn make_subsampler(seed: u64, n: usize, m: usize, include_dc: bool) -> Result<SubsampleSet> {
    if m == 0 || m > n {
        return Err(SrmError::Config(format!(
            "measurement count m={m} must satisfy 1 <= m <= n={n}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut omega: Vec<usize> = if include_dc {
        let mut rest: Vec<usize> = fisher_yates(n - 1, &mut rng)
            .into_iter()
            .take(m - 1)
            .map(|i| i + 1)
            .collect();
        rest.push(0);
        rest
    } else {
        fisher_yates(n, &mut rng).into_iter().take(m).collect()
    };
    omega.sort_unstable();
    Ok(SubsampleSet {
        omega,
        include_dc,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformJson {
    pub kind: TransformKind,
    pub block: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizerJson {
    pub kind: RandomizerKind,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsampleJson {
    pub seed: u64,
    pub include_dc: bool,
}

/// Serializable description of an [`SrmOperator`]; building from the same
/// spec always yields the same operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SrmSpec {
    pub n: usize,
    pub m: usize,
    pub transform: TransformJson,
    pub randomizer: RandomizerJson,
    pub subsample: SubsampleJson,
}

impl SrmSpec {
    pub fn transform_spec(&self) -> TransformSpec {
        TransformSpec {
            kind: self.transform.kind,
            block_size: self.transform.block,
            signal_length: self.n,
            levels: self.transform.levels,
        }
    }

    pub fn build(&self) -> Result<SrmOperator> {
        SrmOperator::new(self)
    }
}

/// `Phi = sqrt(N/M) D F R`.
#[derive(Debug, Clone)]
pub struct SrmOperator {
    spec: SrmSpec,
    transform: Transform,
    randomizer: Randomizer,
    subsample: SubsampleSet,
    scale: f64,
}

impl SrmOperator {
    pub fn new(spec: &SrmSpec) -> Result<Self> {
        let (n, m) = (spec.n, spec.m);
        if m == 0 || m > n {
            return Err(SrmError::Config(format!("m exceeds n (m={m}, n={n})")));
        }
        let transform = Transform::new(spec.transform_spec())?;
        let randomizer = build_randomizer(&RandomizerSpec {
            kind: spec.randomizer.kind,
            seed: spec.randomizer.seed,
            length: n,
        })?;
        let subsample = make_subsampler(spec.subsample.seed, n, m, spec.subsample.include_dc)?;
        Ok(Self {
            spec: *spec,
            transform,
            randomizer,
            subsample,
            scale: (n as f64 / m as f64).sqrt(),
        })
    }

    pub fn spec(&self) -> &SrmSpec {
        &self.spec
    }
    pub fn n(&self) -> usize {
        self.spec.n
    }
    pub fn m(&self) -> usize {
        self.spec.m
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    pub fn transform(&self) -> &Transform {
        &self.transform
    }
    pub fn randomizer(&self) -> &Randomizer {
        &self.randomizer
    }
    pub fn subsample(&self) -> &SubsampleSet {
        &self.subsample
    }
}

/// `y = sqrt(N/M) * select_omega(F(R x))`.
pub fn srm_forward(op: &SrmOperator, x: &[f64]) -> Result<Vec<f64>> {
    check_len(op.n(), x.len())?;
    let mut z = op.randomizer.apply(x)?;
    op.transform.apply_in_place(&mut z)?;
    Ok(op
        .subsample
        .omega
        .iter()
        .map(|&i| op.scale * z[i])
        .collect())
}

/// `Phi^T y = sqrt(N/M) * R^T(F^T(embed_omega(y)))`.
pub fn srm_adjoint(op: &SrmOperator, y: &[f64]) -> Result<Vec<f64>> {
    check_len(op.m(), y.len())?;
    let mut z = vec![0.0; op.n()];
    for (&i, &v) in op.subsample.omega.iter().zip(y) {
        z[i] = op.scale * v;
    }
    op.transform.inverse_in_place(&mut z)?;
    op.randomizer.apply_adjoint(&z)
}

impl LinearMap for SrmOperator {
    fn dim_in(&self) -> usize {
        self.n()
    }
    fn dim_out(&self) -> usize {
        self.m()
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        srm_forward(self, x)
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        srm_adjoint(self, y)
    }
}

/// `A = Phi Psi` with adjoint `Psi^T Phi^T`.
pub struct ComposedOperator {
    phi: Box<dyn LinearMap>,
    psi: Box<dyn LinearMap>,
}

impl std::fmt::Debug for ComposedOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComposedOperator")
            .field("m", &self.phi.dim_out())
            .field("n", &self.psi.dim_in())
            .finish()
    }
}

impl ComposedOperator {
    pub fn phi(&self) -> &dyn LinearMap {
        self.phi.as_ref()
    }
    pub fn psi(&self) -> &dyn LinearMap {
        self.psi.as_ref()
    }
}

/// Composes a sensing map with an `N x N` sparsifying basis.
pub fn compose(
    phi: impl LinearMap + 'static,
    psi: impl LinearMap + 'static,
) -> Result<ComposedOperator> {
    let n = phi.dim_in();
    if psi.dim_in() != n || psi.dim_out() != n {
        return Err(SrmError::Config(format!(
            "basis is {}x{}, sensing map expects {n}x{n}",
            psi.dim_out(),
            psi.dim_in()
        )));
    }
    Ok(ComposedOperator {
        phi: Box::new(phi),
        psi: Box::new(psi),
    })
}

impl LinearMap for ComposedOperator {
    fn dim_in(&self) -> usize {
        self.psi.dim_in()
    }
    fn dim_out(&self) -> usize {
        self.phi.dim_out()
    }
    fn forward(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        self.phi.forward(&self.psi.forward(alpha)?)
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.psi.adjoint(&self.phi.adjoint(y)?)
    }
}

/// Whether every entry of the unscaled `sqrt(B) D F R` is exactly `+-1`.
pub fn entries_in_sign_set(op: &SrmOperator) -> Result<bool> {
    let a = materialize(op)?;
    let factor = (op.transform.spec().block_size as f64).sqrt() / op.scale;
    Ok(a.iter().all(|v| ((v * factor).abs() - 1.0).abs() < 1e-12))
}
