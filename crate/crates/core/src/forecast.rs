use crate::error::{Error, Result};

/// A one-step-ahead forecaster driven by a strict predict/observe alternation.
pub trait Forecaster {
    /// Prediction for the current step.
    fn predict(&mut self) -> Result<f64>;

    /// Feeds the realized observation; returns true if a bin or batch closed at this step.
    fn observe(&mut self, y: f64) -> Result<bool>;

    /// Number of bins (or batches) touched so far, counting an open one.
    fn num_bins(&self) -> usize;

    fn horizon(&self) -> usize;
}

/// Per-step output of driving a forecaster over a full horizon.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ForecastRun {
    pub predictions: Vec<f64>,
    pub restarts: Vec<bool>,
    pub num_bins: usize,
}

/// Drives `forecaster` over `ys`, which must span its horizon exactly.
pub fn run_forecaster<F: Forecaster + ?Sized>(forecaster: &mut F, ys: &[f64]) -> Result<ForecastRun> {
    if ys.len() != forecaster.horizon() {
        return Err(Error::invalid(format!(
            "expected {} observations, got {}",
            forecaster.horizon(),
            ys.len()
        )));
    }
    let mut run = ForecastRun {
        predictions: Vec::with_capacity(ys.len()),
        restarts: Vec::with_capacity(ys.len()),
        num_bins: 0,
    };
    for &y in ys {
        run.predictions.push(forecaster.predict()?);
        run.restarts.push(forecaster.observe(y)?);
    }
    run.num_bins = forecaster.num_bins();
    Ok(run)
}
