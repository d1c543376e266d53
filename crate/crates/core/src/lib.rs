//! Streaming forecasting of trends with bounded total variation.
//!
//! [`policy::ArrowsForecaster`] averages observations within adaptively chosen
//! bins and restarts when the soft-thresholded Haar coefficients of the current
//! bin certify enough variation. [`baselines`] holds restarting online averaging
//! and moving averages with fixed tuned schedules, [`sequences`] the synthetic
//! trends and noise channel, and [`evaluation`] / [`harness`] the regret
//! bookkeeping and experiment runners.

// Validation uses `!(x > 0.0)` so that NaN is rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod evaluation;
pub mod forecast;
pub mod haar;
pub mod harness;
mod numeric;
pub mod policy;
pub mod sequences;

pub use error::{Error, Result};
pub use forecast::{run_forecaster, ForecastRun, Forecaster};
pub use numeric::CompensatedSum;
