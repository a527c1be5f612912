//! Detection performance of noise-type radars.
//!
//! A noise radar (and a quantum two-mode squeezing radar, which shares its
//! covariance structure) decides whether a received signal is correlated
//! with a retained reference signal. This crate covers the whole chain for
//! three correlation detectors:
//!
//! * [`signal`]: the four-channel Gaussian signal model and block sampling,
//! * [`detectors`]: the `D₀`, `ρ̂` and matched-filter statistics,
//! * [`analytic`]: closed-form and exact ROC expressions, and inversion for
//!   the required `Nρ²`,
//! * [`montecarlo`]: reproducible simulation of thresholds and ROC curves,
//! * [`logistic`]: invertible generalized-logistic approximations of the
//!   `p_d`-vs-`Nρ²` curves,
//! * [`specfun`] and [`quad`]: the numerical kernels underneath.
//!
//! For large `N` and small `ρ`, detection performance depends on the two
//! parameters only through `Nρ²`:
//!
//! ```
//! use noise_radar::analytic::{required_nrho2, SmallRhoFamily};
//!
//! let nrho2 = required_nrho2(0.95, 1e-6, SmallRhoFamily::Marcum).unwrap();
//! assert!((nrho2 - 23.24).abs() < 0.01);
//! // at ρ = 0.1 that is 2325 integrated samples
//! let n = (nrho2 / 0.1_f64.powi(2)).ceil();
//! assert_eq!(n, 2325.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod detectors;
mod error;
pub mod fmt;
pub mod logistic;
pub mod montecarlo;
pub mod optimize;
pub mod quad;
pub mod rng;
pub mod roc;
pub mod signal;
pub mod specfun;

pub use error::{Error, Result};
