//! Monte-Carlo experiment harness: phase curves, measurement scaling, the
//! compressible-signal experiment and sensing benchmarks.

mod bench;
mod compressible;
mod ensemble;
mod mstar;
pub mod output;
mod phase;
mod trial;

pub use bench::{bench_sensing, write_bench_csv, BenchConfig, BenchRecord, BENCH_HEADER};
pub use compressible::{
    compressible_trial, measurements_for_rate, power_law_coefficients, psnr,
    run_compressible_experiment, write_compressible_csv, CompressibleConfig, CompressibleRow,
    COMPRESSIBLE_HEADER,
};
pub use ensemble::{gaussian_matrix, Ensemble};
pub use mstar::{
    find_m_star, run_measurement_scaling, write_mstar_csv, MstarConfig, MstarRow, MSTAR_HEADER,
};
pub use phase::{
    count_successes, run_phase_curve, wilson_halfwidth, write_phase_csv, PhaseConfig, PhaseCurve,
    PHASE_HEADER, Z95,
};
pub use trial::{run_recovery_trial, run_trials, trial_outcome, TrialConfig, TrialOutcome};
