use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};
use crate::linear_map::{DenseMap, LinearMap};
use crate::operator::{RandomizerJson, SrmOperator, SrmSpec, SubsampleJson, TransformJson};
use crate::randomize::RandomizerKind;
use crate::rng::rng_from_seed;
use crate::transforms::TransformKind;

/// Sensing ensemble, named like `wht256-l`, `dct32-g`,
/// `wht-l` (full block), or `gaussian`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Ensemble {
    Srm {
        transform: TransformKind,
        /// `None` or any block `>= n` means a single dense block.
        block: Option<usize>,
        randomizer: RandomizerKind,
    },
    /// i.i.d. `N(0, 1/M)` entries.
    GaussianDense,
}

impl Ensemble {
    pub fn srm(transform: TransformKind, block: Option<usize>, randomizer: RandomizerKind) -> Self {
        Ensemble::Srm {
            transform,
            block,
            randomizer,
        }
    }

    /// Block size actually used on a length-`n` signal.
    pub fn block_for(&self, n: usize) -> usize {
        match self {
            Ensemble::Srm { block, .. } => block.map_or(n, |b| b.min(n)),
            Ensemble::GaussianDense => n,
        }
    }

    /// Operator description for one trial; `None` for the Gaussian baseline.
    pub fn srm_spec(
        &self,
        n: usize,
        m: usize,
        randomizer_seed: u64,
        subsample_seed: u64,
        include_dc: bool,
    ) -> Option<SrmSpec> {
        match *self {
            Ensemble::Srm {
                transform,
                randomizer,
                ..
            } => Some(SrmSpec {
                n,
                m,
                transform: TransformJson {
                    kind: transform,
                    block: self.block_for(n),
                    levels: None,
                },
                randomizer: RandomizerJson {
                    kind: randomizer,
                    seed: randomizer_seed,
                },
                subsample: SubsampleJson {
                    seed: subsample_seed,
                    include_dc,
                },
            }),
            Ensemble::GaussianDense => None,
        }
    }

    /// Builds the `M x N` sensing map. The Gaussian baseline draws from
    /// `randomizer_seed`.
    pub fn build(
        &self,
        n: usize,
        m: usize,
        randomizer_seed: u64,
        subsample_seed: u64,
        include_dc: bool,
    ) -> Result<Box<dyn LinearMap>> {
        match self.srm_spec(n, m, randomizer_seed, subsample_seed, include_dc) {
            Some(spec) => Ok(Box::new(SrmOperator::new(&spec)?)),
            None => Ok(Box::new(gaussian_matrix(n, m, randomizer_seed)?)),
        }
    }
}

/// Dense `m x n` matrix with i.i.d. `N(0, 1/m)` entries, filled row-major.
pub fn gaussian_matrix(n: usize, m: usize, seed: u64) -> Result<DenseMap> {
    if m == 0 || m > n {
        return Err(SrmError::Config(format!("m exceeds n (m={m}, n={n})")));
    }
    let mut rng = rng_from_seed(seed);
    let normal = Normal::new(0.0, (1.0 / m as f64).sqrt())
        .map_err(|e| SrmError::Numerical(e.to_string()))?;
    let data: Vec<f64> = (0..m * n).map(|_| normal.sample(&mut rng)).collect();
    Ok(DenseMap(DMatrix::from_row_slice(m, n, &data)))
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ensemble::GaussianDense => write!(f, "gaussian"),
            Ensemble::Srm {
                transform,
                block,
                randomizer,
            } => {
                let r = match randomizer {
                    RandomizerKind::Local => "l",
                    RandomizerKind::Global => "g",
                };
                match block {
                    Some(b) => write!(f, "{}{b}-{r}", transform.name()),
                    None => write!(f, "{}-{r}", transform.name()),
                }
            }
        }
    }
}

impl FromStr for Ensemble {
    type Err = SrmError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if matches!(lower.as_str(), "gaussian" | "gaussian_dense" | "gauss") {
            return Ok(Ensemble::GaussianDense);
        }
        let bad = || SrmError::Config(format!("unknown ensemble '{s}'"));
        let (head, tail) = lower.rsplit_once('-').ok_or_else(bad)?;
        let randomizer = tail.parse::<RandomizerKind>().map_err(|_| bad())?;
        let split = head
            .find(|c: char| c.is_ascii_digit())
            .unwrap_or(head.len());
        let transform = match &head[..split] {
            "wht" => TransformKind::Wht,
            "dct" => TransformKind::Dct,
            _ => return Err(bad()),
        };
        let block = if split == head.len() {
            None
        } else {
            let b: usize = head[split..].parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Some(b)
        };
        Ok(Ensemble::Srm {
            transform,
            block,
            randomizer,
        })
    }
}

impl TryFrom<String> for Ensemble {
    type Error = SrmError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Ensemble> for String {
    fn from(e: Ensemble) -> String {
        e.to_string()
    }
}
