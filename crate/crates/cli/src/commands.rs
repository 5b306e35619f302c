//! Per-command arguments, defaults and execution.
//!
//! Every argument is optional at the type level so that flags, config-file
//! values and defaults can be merged; required keys are checked after the
//! merge.

use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use srm_core::analysis::{
    coherence_scaling_check, cumulative_coherence, heterogeneity, mutual_coherence,
    normality_report, write_scaling_csv, ScalingCheckConfig,
};
use srm_core::experiments::output::{config_hash_of_json, write_metadata};
use srm_core::experiments::{
    bench_sensing, write_bench_csv, write_compressible_csv, write_mstar_csv, write_phase_csv,
    BenchConfig, CompressibleConfig, Ensemble, MstarConfig, PhaseConfig, TrialConfig,
};
use srm_core::operator::{RandomizerJson, SrmOperator, SrmSpec, SubsampleJson, TransformJson};
use srm_core::randomize::RandomizerKind;
use srm_core::recovery::{solve_l1, solve_omp, L1Options, DEFAULT_REL_TOL};
use srm_core::rng::{derive_seed, Stream};
use srm_core::selftest::run_selftest;
use srm_core::transforms::{Basis, TransformKind, TransformSpec};
use srm_core::{LinearMap, SrmError};

use crate::config::required;
use crate::error::{usage, CliError, CliResult};
use crate::vector_io::{read_vector, write_vector};

/// Resolved invocation context shared by all commands.
pub struct Context<'a> {
    pub seed: u64,
    pub out: &'a mut dyn Write,
    /// Flat resolved config, echoed into every output header.
    pub echo: Value,
}

impl Context<'_> {
    fn metadata(&mut self) -> CliResult<()> {
        write_metadata(self.out, self.seed, &self.echo)?;
        Ok(())
    }

    fn config_hash(&self) -> String {
        config_hash_of_json(&self.echo.to_string())
    }
}

/// Solver knobs shared by commands that reconstruct.
fn solver_options(tau_rel: Option<f64>, tol: Option<f64>, max_iter: Option<usize>) -> L1Options {
    let d = L1Options::default();
    L1Options {
        tau_rel: tau_rel.unwrap_or(d.tau_rel),
        tol: tol.unwrap_or(d.tol),
        max_iter: max_iter.unwrap_or(d.max_iter),
        ..d
    }
}

fn operator_seeds(seed: u64) -> (u64, u64) {
    (
        derive_seed(seed, &[Stream::Randomizer as u64]),
        derive_seed(seed, &[Stream::Subsample as u64]),
    )
}

fn srm_spec_for(
    ens: Ensemble,
    n: usize,
    m: usize,
    seed: u64,
    include_dc: bool,
) -> CliResult<SrmSpec> {
    let (r, s) = operator_seeds(seed);
    if m > n {
        return Err(usage(format!("m exceeds n (m={m}, n={n})")));
    }
    ens.srm_spec(n, m, r, s, include_dc)
        .ok_or_else(|| usage("the gaussian ensemble is only available inside experiments"))
}

fn parse_randomizer(s: &str) -> CliResult<Option<RandomizerKind>> {
    match s {
        "none" => Ok(None),
        other => other
            .parse()
            .map(Some)
            .map_err(|e: SrmError| usage(format!("key `randomizer`: {e}"))),
    }
}

// ---------------------------------------------------------------- sense

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SenseArgs {
    /// Signal length; defaults to the length of the input vector.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of measurements.
    #[arg(long)]
    pub m: Option<usize>,
    /// Ensemble name such as wht-l, wht64-g, dct512-l.
    #[arg(long)]
    pub ensemble: Option<Ensemble>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_dc: Option<bool>,
    /// Signal vector (one value per line).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Where to write the operator description as JSON.
    #[arg(long)]
    pub operator_out: Option<PathBuf>,
}

impl SenseArgs {
    pub fn defaults() -> Self {
        Self {
            ensemble: Some("wht-l".parse().expect("valid ensemble")),
            include_dc: Some(false),
            ..Default::default()
        }
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let input = required(&self.input, "input")?;
        let m = required(&self.m, "m")?;
        let x = read_vector(&input)?;
        let n = self.n.unwrap_or(x.len());
        if x.len() != n {
            return Err(usage(format!("input has {} values but n={n}", x.len())));
        }
        let spec = srm_spec_for(
            required(&self.ensemble, "ensemble")?,
            n,
            m,
            ctx.seed,
            self.include_dc.unwrap_or(false),
        )?;
        let op = SrmOperator::new(&spec)?;
        let y = op.forward(&x)?;
        if let Some(path) = &self.operator_out {
            let text = serde_json::to_string_pretty(&spec).map_err(std::io::Error::other)?;
            std::fs::write(path, text + "\n")?;
        }
        ctx.metadata()?;
        writeln!(
            ctx.out,
            "# operator={}",
            serde_json::to_string(&spec).map_err(std::io::Error::other)?
        )?;
        write_vector(ctx.out, &y)?;
        Ok(())
    }
}

// ---------------------------------------------------------- reconstruct

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructArgs {
    /// Operator JSON written by `sense --operator-out`.
    #[arg(long)]
    pub operator: Option<PathBuf>,
    /// Without --operator: rebuild the operator from n, m, ensemble and seed.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub ensemble: Option<Ensemble>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_dc: Option<bool>,
    /// Measurement vector (one value per line).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Sparsifying basis: identity, idct/dct, wht, db8.
    #[arg(long)]
    pub psi: Option<TransformKind>,
    /// l1 or omp.
    #[arg(long)]
    pub solver: Option<String>,
    /// Sparsity budget for omp.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub tau_rel: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Also write the recovered coefficients here.
    #[arg(long)]
    pub coefficients_out: Option<PathBuf>,
}

impl ReconstructArgs {
    pub fn defaults() -> Self {
        let d = L1Options::default();
        Self {
            psi: Some(TransformKind::Identity),
            solver: Some("l1".into()),
            include_dc: Some(false),
            tau_rel: Some(d.tau_rel),
            tol: Some(d.tol),
            max_iter: Some(d.max_iter),
            ..Default::default()
        }
    }

    fn spec(&self, seed: u64, y_len: usize) -> CliResult<SrmSpec> {
        if let Some(path) = &self.operator {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let spec: SrmSpec = serde_json::from_str(&text)
                .map_err(|e| usage(format!("operator {}: {e}", path.display())))?;
            for (key, flag, actual) in [("n", self.n, spec.n), ("m", self.m, spec.m)] {
                if flag.is_some_and(|v| v != actual) {
                    return Err(usage(format!(
                        "key `{key}` conflicts with the operator file ({actual})"
                    )));
                }
            }
            return Ok(spec);
        }
        let n = required(&self.n, "n")?;
        let m = self.m.unwrap_or(y_len);
        srm_spec_for(
            self.ensemble
                .unwrap_or_else(|| "wht-l".parse().expect("valid ensemble")),
            n,
            m,
            seed,
            self.include_dc.unwrap_or(false),
        )
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let y = read_vector(&required(&self.input, "input")?)?;
        let spec = self.spec(ctx.seed, y.len())?;
        if y.len() != spec.m {
            return Err(usage(format!(
                "input has {} values but m={}",
                y.len(),
                spec.m
            )));
        }
        let basis = TransformSpec::full(required(&self.psi, "psi")?, spec.n);
        let a = srm_core::operator::compose(Box::new(spec.build()?), Basis::new(basis)?)?;
        let solved = match required(&self.solver, "solver")?.as_str() {
            "l1" => solve_l1(
                &a,
                &y,
                &solver_options(self.tau_rel, self.tol, self.max_iter),
            )?,
            "omp" => {
                let k = self.k.unwrap_or(spec.m / 2).min(spec.m);
                solve_omp(
                    &a,
                    &y,
                    k,
                    self.tol.unwrap_or(1e-9) * srm_core::linear_map::norm2(&y),
                )?
            }
            other => return Err(usage(format!("key `solver`: unknown solver '{other}'"))),
        };
        let x_hat = Basis::new(basis)?.forward(&solved.alpha_hat)?;
        if let Some(path) = &self.coefficients_out {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            write_vector(&mut f, &solved.alpha_hat)?;
            f.flush()?;
        }
        ctx.metadata()?;
        writeln!(
            ctx.out,
            "# converged={} iterations={} residual={}",
            solved.converged, solved.iterations, solved.residual
        )?;
        write_vector(ctx.out, &x_hat)?;
        if !solved.converged {
            return Err(CliError::Numerical(format!(
                "solver did not converge within {} iterations",
                solved.iterations
            )));
        }
        Ok(())
    }
}

// ------------------------------------------------------------ coherence

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoherenceArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Sensing transform F.
    #[arg(long)]
    pub f: Option<TransformKind>,
    /// Block size of F (defaults to n).
    #[arg(long)]
    pub block: Option<usize>,
    /// none, local or global.
    #[arg(long)]
    pub randomizer: Option<String>,
    /// Sparsifying basis.
    #[arg(long)]
    pub psi: Option<TransformKind>,
    /// Support for the cumulative coherence, e.g. 0,3,9.
    #[arg(long, value_delimiter = ',')]
    pub support: Option<Vec<usize>>,
    /// Scaling mode: max over seeds of mu(F R, Psi) across a grid of n.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub scaling: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub randomizers: Option<Vec<RandomizerKind>>,
    #[arg(long)]
    pub seeds: Option<usize>,
}

impl CoherenceArgs {
    pub fn defaults() -> Self {
        let s = ScalingCheckConfig::default();
        Self {
            f: Some(TransformKind::Wht),
            randomizer: Some("none".into()),
            psi: Some(TransformKind::Identity),
            scaling: Some(false),
            n_grid: Some(s.n_grid),
            randomizers: Some(s.randomizers),
            seeds: Some(s.seeds),
            ..Default::default()
        }
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let f = required(&self.f, "f")?;
        let psi_kind = required(&self.psi, "psi")?;
        if self.scaling.unwrap_or(false) {
            let cfg = ScalingCheckConfig {
                n_grid: required(&self.n_grid, "n_grid")?,
                block: self.block,
                transform: f,
                psi: psi_kind,
                randomizers: required(&self.randomizers, "randomizers")?,
                seeds: required(&self.seeds, "seeds")?,
                master_seed: ctx.seed,
            };
            let cells = coherence_scaling_check(&cfg)?;
            writeln!(ctx.out, "# config_flat={}", ctx.echo)?;
            write_scaling_csv(ctx.out, &cfg, &cells)?;
            return Ok(());
        }
        let n = required(&self.n, "n")?;
        let block = self.block.unwrap_or(n);
        let psi = Basis::new(TransformSpec::full(psi_kind, n))?;
        let a: Box<dyn LinearMap> =
            match parse_randomizer(&required(&self.randomizer, "randomizer")?)? {
                None => Box::new(srm_core::transforms::Transform::new(TransformSpec::block(
                    f, n, block,
                ))?),
                Some(kind) => {
                    let (rseed, sseed) = operator_seeds(ctx.seed);
                    Box::new(SrmOperator::new(&SrmSpec {
                        n,
                        m: n,
                        transform: TransformJson {
                            kind: f,
                            block,
                            levels: None,
                        },
                        randomizer: RandomizerJson { kind, seed: rseed },
                        subsample: SubsampleJson {
                            seed: sseed,
                            include_dc: false,
                        },
                    })?)
                }
            };
        let mut report = mutual_coherence(a.as_ref(), &psi)?;
        if let Some(support) = &self.support {
            report.mu_c = Some(cumulative_coherence(a.as_ref(), &psi, support)?);
        }
        let het = heterogeneity(&psi)?;
        let doc = json!({
            "master_seed": ctx.seed,
            "config_hash": ctx.config_hash(),
            "config": ctx.echo,
            "mu": report.mu,
            "mu_n": report.mu_n,
            "mu_c": report.mu_c,
            "rows": report.rows,
            "n": report.n,
            "rho_psi": het.rho_psi,
        });
        writeln!(
            ctx.out,
            "{}",
            serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)?
        )?;
        Ok(())
    }
}

// ------------------------------------------------------------------- qq

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QqArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub f: Option<TransformKind>,
    #[arg(long)]
    pub block: Option<usize>,
    #[arg(long)]
    pub randomizer: Option<RandomizerKind>,
    #[arg(long)]
    pub psi: Option<TransformKind>,
    /// Operators pooled into the sample.
    #[arg(long)]
    pub seeds: Option<usize>,
}

impl QqArgs {
    pub fn defaults() -> Self {
        Self {
            n: Some(256),
            m: Some(128),
            f: Some(TransformKind::Dct),
            randomizer: Some(RandomizerKind::Local),
            psi: Some(TransformKind::Db8Wavelet),
            seeds: Some(10),
            ..Default::default()
        }
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let n = required(&self.n, "n")?;
        let m = required(&self.m, "m")?;
        if m > n {
            return Err(usage(format!("m exceeds n (m={m}, n={n})")));
        }
        let (rseed, sseed) = operator_seeds(ctx.seed);
        let spec = SrmSpec {
            n,
            m,
            transform: TransformJson {
                kind: required(&self.f, "f")?,
                block: self.block.unwrap_or(n),
                levels: None,
            },
            randomizer: RandomizerJson {
                kind: required(&self.randomizer, "randomizer")?,
                seed: rseed,
            },
            subsample: SubsampleJson {
                seed: sseed,
                include_dc: false,
            },
        };
        let psi = Basis::new(TransformSpec::full(required(&self.psi, "psi")?, n))?;
        let r = normality_report(&spec, &psi, required(&self.seeds, "seeds")?)?;
        ctx.metadata()?;
        writeln!(
            ctx.out,
            "# ks_distance={} sigma2_hat={} mean_hat={} num_entries={} num_seeds={}",
            r.ks_distance, r.sigma2_hat, r.mean_hat, r.num_entries, r.num_seeds
        )?;
        writeln!(ctx.out, "normal_quantile,sample_quantile")?;
        for (t, e) in &r.qq_pairs {
            writeln!(ctx.out, "{t},{e}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- phase

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub psi: Option<TransformKind>,
    #[arg(long)]
    pub ensemble: Option<Ensemble>,
    /// Sparsity grid, e.g. 10,20,30.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_dc: Option<bool>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub tau_rel: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

impl PhaseArgs {
    pub fn defaults() -> Self {
        let d = L1Options::default();
        Self {
            n: Some(256),
            m: Some(128),
            psi: Some(TransformKind::Dct),
            ensemble: Some("wht-l".parse().expect("valid ensemble")),
            k: Some(vec![10, 20, 30, 40, 50, 60]),
            trials: Some(200),
            include_dc: Some(false),
            rel_tol: Some(DEFAULT_REL_TOL),
            tau_rel: Some(d.tau_rel),
            tol: Some(d.tol),
            max_iter: Some(d.max_iter),
        }
    }

    pub fn config(&self, seed: u64) -> CliResult<PhaseConfig> {
        let mut base = TrialConfig::new(
            required(&self.n, "n")?,
            required(&self.m, "m")?,
            0,
            required(&self.ensemble, "ensemble")?,
            required(&self.psi, "psi")?,
        );
        base.trials = required(&self.trials, "trials")?;
        base.master_seed = seed;
        base.include_dc = self.include_dc.unwrap_or(false);
        base.rel_tol = required(&self.rel_tol, "rel_tol")?;
        base.solver = solver_options(self.tau_rel, self.tol, self.max_iter);
        base.validate()?;
        Ok(PhaseConfig {
            base,
            k_grid: required(&self.k, "k")?,
        })
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let cfg = self.config(ctx.seed)?;
        writeln!(ctx.out, "# config_flat={}", ctx.echo)?;
        write_phase_csv(ctx.out, &cfg)?;
        Ok(())
    }
}

// ---------------------------------------------------------------- mstar

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MstarArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub psi: Option<TransformKind>,
    #[arg(long)]
    pub ensemble: Option<Ensemble>,
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Target recovery probability.
    #[arg(long)]
    pub p_star: Option<f64>,
    /// Trials per probe.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_dc: Option<bool>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub tau_rel: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

impl MstarArgs {
    pub fn defaults() -> Self {
        let d = L1Options::default();
        Self {
            n: Some(256),
            psi: Some(TransformKind::Dct),
            ensemble: Some("wht-l".parse().expect("valid ensemble")),
            k: Some(vec![5, 10, 15, 20]),
            p_star: Some(0.9),
            trials: Some(100),
            resolution: Some(4),
            include_dc: Some(false),
            rel_tol: Some(DEFAULT_REL_TOL),
            tau_rel: Some(d.tau_rel),
            tol: Some(d.tol),
            max_iter: Some(d.max_iter),
        }
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let n = required(&self.n, "n")?;
        let mut base = TrialConfig::new(
            n,
            n,
            1,
            required(&self.ensemble, "ensemble")?,
            required(&self.psi, "psi")?,
        );
        base.master_seed = ctx.seed;
        base.include_dc = self.include_dc.unwrap_or(false);
        base.rel_tol = required(&self.rel_tol, "rel_tol")?;
        base.solver = solver_options(self.tau_rel, self.tol, self.max_iter);
        let mut cfg = MstarConfig::new(
            base,
            required(&self.k, "k")?,
            required(&self.p_star, "p_star")?,
        );
        cfg.base.trials = required(&self.trials, "trials")?;
        cfg.resolution = required(&self.resolution, "resolution")?;
        writeln!(ctx.out, "# config_flat={}", ctx.echo)?;
        write_mstar_csv(ctx.out, &cfg)?;
        Ok(())
    }
}

// --------------------------------------------------------- compressible

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompressibleArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Power-law decay exponent of the sorted coefficients.
    #[arg(long)]
    pub decay: Option<f64>,
    #[arg(long)]
    pub psi: Option<TransformKind>,
    /// Sampling rates M/N, e.g. 0.15,0.25.
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub ensembles: Option<Vec<Ensemble>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_dc: Option<bool>,
    #[arg(long)]
    pub tau_rel: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

impl CompressibleArgs {
    pub fn defaults() -> Self {
        let d = CompressibleConfig::default();
        Self {
            n: Some(d.n),
            decay: Some(d.decay),
            psi: Some(d.psi),
            rates: Some(d.rates),
            ensembles: Some(d.ensembles),
            trials: Some(d.trials),
            include_dc: Some(d.include_dc),
            tau_rel: Some(d.solver.tau_rel),
            tol: Some(d.solver.tol),
            max_iter: Some(d.solver.max_iter),
        }
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let cfg = CompressibleConfig {
            n: required(&self.n, "n")?,
            decay: required(&self.decay, "decay")?,
            psi: required(&self.psi, "psi")?,
            rates: required(&self.rates, "rates")?,
            ensembles: required(&self.ensembles, "ensembles")?,
            trials: required(&self.trials, "trials")?,
            master_seed: ctx.seed,
            include_dc: self.include_dc.unwrap_or(true),
            solver: solver_options(self.tau_rel, self.tol, self.max_iter),
        };
        writeln!(ctx.out, "# config_flat={}", ctx.echo)?;
        write_compressible_csv(ctx.out, &cfg)?;
        Ok(())
    }
}

// ---------------------------------------------------------------- bench

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchArgs {
    /// Signal lengths (powers of two).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// M = N / m_divisor.
    #[arg(long)]
    pub m_divisor: Option<usize>,
    #[arg(long)]
    pub ensemble: Option<Ensemble>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Largest N with an explicit dense baseline.
    #[arg(long)]
    pub dense_cap: Option<usize>,
}

impl BenchArgs {
    pub fn defaults() -> Self {
        let d = BenchConfig::default();
        Self {
            sizes: Some(d.sizes),
            m_divisor: Some(d.m_divisor),
            ensemble: Some(d.ensemble),
            repetitions: Some(d.repetitions),
            dense_cap: Some(d.dense_cap),
        }
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let cfg = BenchConfig {
            sizes: required(&self.sizes, "sizes")?,
            m_divisor: required(&self.m_divisor, "m_divisor")?,
            ensemble: required(&self.ensemble, "ensemble")?,
            repetitions: required(&self.repetitions, "repetitions")?,
            dense_cap: required(&self.dense_cap, "dense_cap")?,
            master_seed: ctx.seed,
            ..BenchConfig::default()
        };
        let records = bench_sensing(&cfg)?;
        writeln!(ctx.out, "# config_flat={}", ctx.echo)?;
        write_bench_csv(ctx.out, &cfg, &records)?;
        Ok(())
    }
}

// ------------------------------------------------------------- selftest

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestArgs {
    /// List every check, not only failures.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub verbose: Option<bool>,
}

impl SelftestArgs {
    pub fn defaults() -> Self {
        Self {
            verbose: Some(false),
        }
    }

    pub fn run(&self, ctx: &mut Context) -> CliResult<()> {
        let results = run_selftest();
        let failed = results.iter().filter(|r| !r.passed).count();
        for r in &results {
            if !r.passed {
                writeln!(ctx.out, "FAIL {}: {}", r.name, r.detail)?;
            } else if self.verbose.unwrap_or(false) {
                writeln!(ctx.out, "PASS {}", r.name)?;
            }
        }
        writeln!(
            ctx.out,
            "selftest: {} passed, {failed} failed",
            results.len() - failed
        )?;
        if failed > 0 {
            return Err(CliError::Numerical(format!(
                "{failed} self-test checks failed"
            )));
        }
        Ok(())
    }
}
