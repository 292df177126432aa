//! hypermix: a desk-scale numerical laboratory for mixing exponential
//! operator groups.
//!
//! The crate builds, at finite dimension, the constructive objects behind
//! hereditarily hypercyclic operator groups: nilpotent backward-shift
//! blocks and their two-point steering solver ([`jordan_core`]), commuting
//! tensor tuples of shifts with multi-parameter steering ([`tensor_ebs`]),
//! a truncated weighted-shift group on a sequence-space model with
//! certified series truncation ([`seqspace_group`]), empirical mixing
//! certificates and orbit-coverage demos ([`mixing_cert`]), a gallery of
//! symbol criteria for adjoint multipliers ([`spectral_gallery`]), and
//! discretized `L_p` models with dilation and translation groups
//! ([`lp_grid`]).
//!
//! Every experiment is reproducible: runners in [`report`] take a seeded
//! config and write deterministic JSON/CSV artifacts. See the `examples/`
//! directory for one runnable entry point per capability, or the thin
//! `hypermix` binary for the batch CLI.

pub mod error;
pub mod jordan_core;
pub mod lp_grid;
pub mod matrix;
pub mod mixing_cert;
pub mod report;
pub mod scalar;
pub mod seqspace_group;
pub mod spectral_gallery;
pub mod tensor_ebs;

pub use error::{Error, Result};
