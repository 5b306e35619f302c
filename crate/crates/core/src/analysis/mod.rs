//! Coherence and distributional statistics of sensing operators against
//! sparsifying bases.

mod coherence;
mod normality;
mod scaling;

pub use coherence::{
    cumulative_coherence, heterogeneity, heterogeneity_of_matrix, mutual_coherence,
    CoherenceReport, HeterogeneityReport,
};
pub use normality::{
    ks_statistic, normal_cdf, normal_quantile, normality_of_sample, normality_report,
    NormalityReport, QQ_POINTS,
};
pub use scaling::{
    coherence_of_randomized, coherence_scaling_check, write_scaling_csv, ScalingCell,
    ScalingCheckConfig,
};
