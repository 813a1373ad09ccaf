//! Second-order online linear regression under target drift.
//!
//! The crate provides, behind one per-sample predict/update interface:
//!
//! - stationary baselines: NLMS, RLS, AAR, AROWR, and CR-RLS (RLS with
//!   scheduled covariance resets);
//! - ARCOR: AROWR with data-dependent covariance resets against a decaying
//!   eigenvalue floor and Mahalanobis projection of the weights;
//! - LASER: the last-step min-max predictor for drifting targets, with an
//!   exact `c = inf` reduction to AAR;
//! - brute-force oracles used to audit the recursions, seeded drift-aware
//!   data generators, and an experiment harness with a CLI (`driftreg`).
//!
//! Everything is deterministic given a seed; replicated experiments derive
//! per-replica seeds from the base seed.

// `!(x > 0.0)` style checks are used throughout parameter validation
// because they reject NaN, which `x <= 0.0` would accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arcor;
pub mod cli;
pub mod consts;
pub mod datagen;
pub mod error;
pub mod harness;
pub mod laser;
pub mod learners;
pub mod linalg;
pub mod oracles;

pub use error::{Error, Result};
