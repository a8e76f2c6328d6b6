//! Bayesian inference for censored outcomes.
//!
//! The crate evaluates censored likelihoods two ways (exactly, and the
//! dinterval-style latent-imputation form whose deviance monitor ignores
//! censored rows), samples posteriors with adaptive Metropolis within Gibbs,
//! and scores models with DIC and PED.

// `!(x > 0.0)` is used on purpose so NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod io;
pub mod likelihood;
pub mod mcmc;
pub mod model;
pub mod selection;

pub use error::{Error, Result};
