use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SrmError};
use crate::linear_map::LinearMap;
use crate::operator::compose;
use crate::recovery::{
    check_exact_recovery, generate_sparse_signal, relative_error, solve_l1, L1Options,
    SparseSignalSpec, DEFAULT_REL_TOL,
};
use crate::rng::{derive_seed, Stream};
use crate::transforms::{Basis, TransformKind, TransformSpec};

use super::Ensemble;

/// One Monte-Carlo recovery experiment point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub ensemble: Ensemble,
    /// Sparsifying basis `Psi` over the full signal length.
    pub psi: TransformKind,
    pub trials: usize,
    pub master_seed: u64,
    pub rel_tol: f64,
    pub include_dc: bool,
    pub solver: L1Options,
}

impl TrialConfig {
    pub fn new(n: usize, m: usize, k: usize, ensemble: Ensemble, psi: TransformKind) -> Self {
        Self {
            n,
            m,
            k,
            ensemble,
            psi,
            trials: 200,
            master_seed: 0,
            rel_tol: DEFAULT_REL_TOL,
            include_dc: false,
            solver: L1Options::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(SrmError::Config("trials must be at least 1".into()));
        }
        if self.m == 0 || self.m > self.n {
            return Err(SrmError::Config(format!(
                "m exceeds n (m={}, n={})",
                self.m, self.n
            )));
        }
        if self.k > self.n {
            return Err(SrmError::Config(format!(
                "k={} exceeds n={}",
                self.k, self.n
            )));
        }
        TransformSpec::full(self.psi, self.n).validate()?;
        if let Ensemble::Srm { transform, .. } = self.ensemble {
            TransformSpec::block(transform, self.n, self.ensemble.block_for(self.n)).validate()?;
        }
        Ok(())
    }

    /// Seed for one stream of trial `index`. Sensing seeds and signal seeds
    /// depend on `(master, k, index)` only, so every ensemble and every `M`
    /// sees the same signals and randomness for the same trial index.
    pub fn seed(&self, index: u64, stream: Stream) -> u64 {
        derive_seed(self.master_seed, &[self.k as u64, index, stream as u64])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub success: bool,
    pub converged: bool,
    pub rel_error: f64,
}

/// Generates a signal, senses it, reconstructs with the l1 solver and
/// adjudicates exact recovery.
pub fn trial_outcome(cfg: &TrialConfig, index: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    let basis = TransformSpec::full(cfg.psi, cfg.n);
    let signal = generate_sparse_signal(&SparseSignalSpec {
        n: cfg.n,
        k: cfg.k,
        basis,
        seed: cfg.seed(index, Stream::Signal),
    })?;
    let phi = cfg.ensemble.build(
        cfg.n,
        cfg.m,
        cfg.seed(index, Stream::Randomizer),
        cfg.seed(index, Stream::Subsample),
        cfg.include_dc,
    )?;
    let y = phi.forward(&signal.x)?;
    let a = compose(phi, Basis::new(basis)?)?;
    let solved = solve_l1(&a, &y, &cfg.solver)?;
    let success = solved.converged || cfg.k == 0;
    let exact = check_exact_recovery(&solved.alpha_hat, &signal.alpha, cfg.rel_tol)?;
    Ok(TrialOutcome {
        success: success && exact,
        converged: solved.converged,
        rel_error: relative_error(&solved.alpha_hat, &signal.alpha),
    })
}

/// Whether trial `index` of `cfg` recovers its signal exactly.
pub fn run_recovery_trial(cfg: &TrialConfig, index: u64) -> Result<bool> {
    Ok(trial_outcome(cfg, index)?.success)
}

/// Runs all `cfg.trials` trials concurrently; results are in trial order.
pub fn run_trials(cfg: &TrialConfig) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| trial_outcome(cfg, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomize::RandomizerKind;
    use std::collections::HashSet;

    fn cfg(n: usize, m: usize, k: usize, e: &str, psi: TransformKind) -> TrialConfig {
        TrialConfig::new(n, m, k, e.parse().unwrap(), psi)
    }

    #[test]
    fn zero_sparsity_always_succeeds() {
        let c = cfg(64, 16, 0, "wht64-l", TransformKind::Dct);
        for i in 0..5 {
            assert!(run_recovery_trial(&c, i).unwrap());
        }
    }

    #[test]
    fn full_sampling_succeeds() {
        for e in ["wht64-l", "wht16-g", "dct64-l", "dct8-g", "gaussian"] {
            for k in [1, 8, 16] {
                let c = cfg(64, 64, k, e, TransformKind::Dct);
                assert!(run_recovery_trial(&c, 3).unwrap(), "{e} k={k}");
            }
        }
    }

    #[test]
    fn reference_instance_succeeds() {
        let mut c = cfg(64, 32, 4, "wht64-l", TransformKind::Identity);
        c.master_seed = 2024;
        let out = trial_outcome(&c, 0).unwrap();
        assert!(out.success, "{out:?}");
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let mut seen = HashSet::new();
        for k in [10usize, 20, 30, 40, 50, 60] {
            let c = TrialConfig {
                k,
                ..cfg(256, 128, k, "wht256-l", TransformKind::Dct)
            };
            for i in 0..500 {
                for s in [Stream::Signal, Stream::Randomizer, Stream::Subsample] {
                    assert!(seen.insert(c.seed(i, s)));
                }
            }
        }
    }

    #[test]
    fn invalid_configs() {
        let mut c = cfg(64, 65, 4, "wht64-l", TransformKind::Dct);
        assert!(c.validate().is_err());
        c.m = 32;
        c.trials = 0;
        assert!(c.validate().is_err());
        let c = TrialConfig::new(
            48,
            16,
            2,
            Ensemble::srm(TransformKind::Wht, None, RandomizerKind::Local),
            TransformKind::Dct,
        );
        assert!(c.validate().is_err());
    }
}
