//! Fast orthonormal transforms used both as the sensing transform `F` and as
//! sparsifying bases `Psi`, with block-diagonal composition.

mod dct;
mod wavelet;
mod wht;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SrmError};
use crate::linear_map::LinearMap;

pub use dct::{dct_apply, dct_inverse, DctPlan};
pub use wavelet::{check_levels, default_levels, wavelet_analysis, wavelet_synthesis, DB8_LOWPASS};
pub use wht::{wht_apply, wht_in_place};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    #[serde(alias = "hadamard")]
    Wht,
    #[serde(alias = "idct")]
    Dct,
    #[serde(alias = "id")]
    Identity,
    #[serde(rename = "db8", alias = "wavelet")]
    Db8Wavelet,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Wht => "wht",
            TransformKind::Dct => "dct",
            TransformKind::Identity => "identity",
            TransformKind::Db8Wavelet => "db8",
        }
    }
}

impl std::str::FromStr for TransformKind {
    type Err = SrmError;

    /// Accepts the sparsifying-basis aliases `idct` (the DCT basis) and
    /// `wavelet`/`db8` as well as the canonical names.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wht" | "hadamard" => Ok(Self::Wht),
            "dct" | "idct" => Ok(Self::Dct),
            "identity" | "id" | "i" => Ok(Self::Identity),
            "db8" | "wavelet" | "daubechies8" => Ok(Self::Db8Wavelet),
            other => Err(SrmError::Config(format!(
                "unknown transform kind '{other}'"
            ))),
        }
    }
}

/// Which orthonormal transform to apply, on how long a signal, in which block size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    #[serde(rename = "block")]
    pub block_size: usize,
    #[serde(rename = "n")]
    pub signal_length: usize,
    /// Wavelet decomposition depth per block; `None` picks [`default_levels`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
}

impl TransformSpec {
    /// Single full-length block.
    pub fn full(kind: TransformKind, n: usize) -> Self {
        Self {
            kind,
            block_size: n,
            signal_length: n,
            levels: None,
        }
    }

    pub fn block(kind: TransformKind, n: usize, block_size: usize) -> Self {
        Self {
            kind,
            block_size,
            signal_length: n,
            levels: None,
        }
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = Some(levels);
        self
    }

    pub fn wavelet_levels(&self) -> usize {
        self.levels
            .unwrap_or_else(|| default_levels(self.block_size))
    }

    pub fn validate(&self) -> Result<()> {
        let (n, b) = (self.signal_length, self.block_size);
        if n == 0 || b == 0 {
            return Err(SrmError::Config(
                "signal length and block size must be positive".into(),
            ));
        }
        if n % b != 0 {
            return Err(SrmError::Config(format!(
                "block size {b} does not divide signal length {n}"
            )));
        }
        match self.kind {
            TransformKind::Wht if !b.is_power_of_two() => Err(SrmError::Config(format!(
                "WHT block size must be a power of two, got {b}"
            ))),
            TransformKind::Db8Wavelet if b > 1 => check_levels(b, self.wavelet_levels()),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Identity,
    Wht,
    Dct(DctPlan),
    Wavelet { levels: usize },
}

/// A validated transform ready for repeated application.
///
/// As a [`LinearMap`] the forward direction is the analysis transform `F`
/// (DCT-II, WHT, wavelet analysis) and the adjoint is its inverse.
#[derive(Debug, Clone)]
pub struct Transform {
    spec: TransformSpec,
    engine: Engine,
}

impl Transform {
    pub fn new(spec: TransformSpec) -> Result<Self> {
        spec.validate()?;
        let engine = if spec.block_size == 1 {
            // 1x1 orthonormal block fixed to +1
            Engine::Identity
        } else {
            match spec.kind {
                TransformKind::Identity => Engine::Identity,
                TransformKind::Wht => Engine::Wht,
                TransformKind::Dct => Engine::Dct(DctPlan::new(spec.block_size)?),
                TransformKind::Db8Wavelet => Engine::Wavelet {
                    levels: spec.wavelet_levels(),
                },
            }
        };
        Ok(Self { spec, engine })
    }

    pub fn spec(&self) -> &TransformSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.spec.signal_length
    }

    pub fn is_empty(&self) -> bool {
        self.spec.signal_length == 0
    }

    /// Applies the analysis transform to every block of `v` in place.
    pub fn apply_in_place(&self, v: &mut [f64]) -> Result<()> {
        check_len(self.spec.signal_length, v.len())?;
        let b = self.spec.block_size;
        match &self.engine {
            Engine::Identity => {}
            Engine::Wht => {
                for block in v.chunks_exact_mut(b) {
                    wht_in_place(block)?;
                }
            }
            Engine::Dct(plan) => {
                for block in v.chunks_exact_mut(b) {
                    plan.forward_in_place(block)?;
                }
            }
            Engine::Wavelet { levels } => {
                for block in v.chunks_exact_mut(b) {
                    let c = wavelet_analysis(block, *levels)?;
                    block.copy_from_slice(&c);
                }
            }
        }
        Ok(())
    }

    /// Applies the inverse (= transpose) transform to every block in place.
    pub fn inverse_in_place(&self, v: &mut [f64]) -> Result<()> {
        check_len(self.spec.signal_length, v.len())?;
        let b = self.spec.block_size;
        match &self.engine {
            Engine::Identity => {}
            Engine::Wht => {
                for block in v.chunks_exact_mut(b) {
                    wht_in_place(block)?;
                }
            }
            Engine::Dct(plan) => {
                for block in v.chunks_exact_mut(b) {
                    plan.inverse_in_place(block)?;
                }
            }
            Engine::Wavelet { levels } => {
                for block in v.chunks_exact_mut(b) {
                    let x = wavelet_synthesis(block, *levels)?;
                    block.copy_from_slice(&x);
                }
            }
        }
        Ok(())
    }

    /// View of this transform as a sparsifying basis `Psi` (synthesis direction).
    pub fn into_basis(self) -> Basis {
        Basis(self)
    }
}

impl LinearMap for Transform {
    fn dim_in(&self) -> usize {
        self.spec.signal_length
    }
    fn dim_out(&self) -> usize {
        self.spec.signal_length
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = x.to_vec();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = y.to_vec();
        self.inverse_in_place(&mut out)?;
        Ok(out)
    }
}

/// Sparsifying basis `Psi`: columns are the basis functions, so `forward`
/// synthesizes a signal `x = Psi alpha` and `adjoint` computes coefficients.
///
/// For `kind = dct` this is the IDCT basis.
#[derive(Debug, Clone)]
pub struct Basis(Transform);

impl Basis {
    pub fn new(spec: TransformSpec) -> Result<Self> {
        Ok(Basis(Transform::new(spec)?))
    }

    pub fn spec(&self) -> &TransformSpec {
        self.0.spec()
    }
}

impl LinearMap for Basis {
    fn dim_in(&self) -> usize {
        self.0.len()
    }
    fn dim_out(&self) -> usize {
        self.0.len()
    }
    fn forward(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        self.0.adjoint(alpha)
    }
    fn adjoint(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.forward(x)
    }
}

/// Applies the base transform of `spec` independently to each length-`B`
/// block of `v`.
pub fn block_apply(spec: TransformSpec, v: &[f64]) -> Result<Vec<f64>> {
    let spec = TransformSpec {
        signal_length: v.len(),
        ..spec
    };
    Transform::new(spec)?.forward(v)
}
