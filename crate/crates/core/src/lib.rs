//! Monte Carlo laboratory for level exceedences of highly multiple Student
//! t-tests computed from a κ-dependent data panel.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: normal and Student t distribution functions, the
//!   bivariate-normal orthant oracle, and the threshold / error-bound calculus.
//! * [`panelgen`]: seeded generation of `p × n` panels with κ-dependent rows.
//! * [`studentize`]: the per-row statistics `T_i` and `R_i`.
//! * [`exceedance`]: exceedence sets, block decompositions, tail and coupling
//!   estimators.
//! * [`mtc`]: bin counts, Benjamini–Hochberg, step-down FWER and realized
//!   error rates.
//! * [`montecarlo`]: schedule-independent replicate execution and the
//!   accumulators shared by every estimator.

pub mod config;
pub mod error;
pub mod exceedance;
pub mod montecarlo;
pub mod mtc;
pub mod numerics;
pub mod panelgen;
pub mod rng;
pub mod studentize;

pub use error::{Error, Result};
