//! Structurally random matrices for compressive sensing.
//!
//! The sensing operator is `Phi = sqrt(N/M) * D * F * R`: a randomizer `R`
//! (sign flips or a permutation), a fast orthonormal transform `F` (possibly
//! block diagonal) and a uniform row subsampler `D`. The crate provides the
//! operator and its adjoint, sparse-recovery solvers, coherence statistics and
//! a deterministic Monte-Carlo experiment harness.

pub mod error;
pub mod linear_map;
pub mod rng;
pub mod transforms;

pub use error::{Result, SrmError};
pub use linear_map::{materialize, materialize_adjoint, DenseMap, IdentityMap, LinearMap};
pub mod analysis;
pub mod experiments;
pub mod operator;
pub mod randomize;
pub mod recovery;
pub mod selftest;
