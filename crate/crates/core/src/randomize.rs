//! Pre-randomization `R`: local sign flips or a global uniform permutation.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SrmError};
use crate::linear_map::LinearMap;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RandomizerKind {
    /// Diagonal of i.i.d. fair signs.
    Local,
    /// Uniform random permutation of sample positions.
    Global,
}

impl std::str::FromStr for RandomizerKind {
    type Err = SrmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "local" | "l" => Ok(Self::Local),
            "global" | "g" => Ok(Self::Global),
            other => Err(SrmError::Config(format!("unknown randomizer '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizerSpec {
    pub kind: RandomizerKind,
    pub seed: u64,
    pub length: usize,
}

/// Built randomizer; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Randomizer {
    Local {
        signs: Vec<f64>,
    },
    /// `(R v)[i] = v[perm[i]]`
    Global {
        perm: Vec<usize>,
    },
}

/// Seeded Fisher-Yates shuffle of `0..n`.
pub(crate) fn fisher_yates(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Builds the randomizer described by `spec`; a pure function of the seed.
pub fn build_randomizer(spec: &RandomizerSpec) -> Result<Randomizer> {
    if spec.length == 0 {
        return Err(SrmError::Config(
            "randomizer length must be at least 1".into(),
        ));
    }
    let mut rng = rng_from_seed(spec.seed);
    Ok(match spec.kind {
        RandomizerKind::Local => Randomizer::Local {
            signs: (0..spec.length)
                .map(|_| if rng.next_u64() >> 63 == 0 { 1.0 } else { -1.0 })
                .collect(),
        },
        RandomizerKind::Global => Randomizer::Global {
            perm: fisher_yates(spec.length, &mut rng),
        },
    })
}

impl Randomizer {
    pub fn len(&self) -> usize {
        match self {
            Randomizer::Local { signs } => signs.len(),
            Randomizer::Global { perm } => perm.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> RandomizerKind {
        match self {
            Randomizer::Local { .. } => RandomizerKind::Local,
            Randomizer::Global { .. } => RandomizerKind::Global,
        }
    }

    /// `R v`
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), v.len())?;
        Ok(match self {
            Randomizer::Local { signs } => v.iter().zip(signs).map(|(x, s)| x * s).collect(),
            Randomizer::Global { perm } => perm.iter().map(|&p| v[p]).collect(),
        })
    }

    /// `R^T v`
    pub fn apply_adjoint(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), v.len())?;
        Ok(match self {
            Randomizer::Local { .. } => return self.apply(v),
            Randomizer::Global { perm } => {
                let mut out = vec![0.0; v.len()];
                for (i, &p) in perm.iter().enumerate() {
                    out[p] = v[i];
                }
                out
            }
        })
    }

    /// Sign values (local) or permutation indices (global), for export.
    pub fn as_values(&self) -> Vec<i64> {
        match self {
            Randomizer::Local { signs } => signs.iter().map(|&s| s as i64).collect(),
            Randomizer::Global { perm } => perm.iter().map(|&p| p as i64).collect(),
        }
    }
}

impl LinearMap for Randomizer {
    fn dim_in(&self) -> usize {
        self.len()
    }
    fn dim_out(&self) -> usize {
        self.len()
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply(x)
    }
    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.apply_adjoint(y)
    }
}

/// `R v` for a built randomizer.
pub fn apply_randomizer(r: &Randomizer, v: &[f64]) -> Result<Vec<f64>> {
    r.apply(v)
}

/// `R^T v` for a built randomizer.
pub fn apply_randomizer_adjoint(r: &Randomizer, v: &[f64]) -> Result<Vec<f64>> {
    r.apply_adjoint(v)
}
