//! Dynamic regret of forecast traces and log-log scaling fits.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::ForecastRun;
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub theta: f64,
    pub y: f64,
    pub x: f64,
    pub loss: f64,
    pub restart: bool,
}

/// Per-step record of one forecaster run against a known trend.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub algo: String,
    pub seed: u64,
    /// Resolved algorithm parameters, used to check traces are comparable.
    pub params: serde_json::Value,
    pub rows: Vec<TraceRow>,
    pub num_bins: usize,
    pub wallclock: Duration,
}

impl TrialTrace {
    pub fn assemble(
        algo: impl Into<String>,
        seed: u64,
        params: serde_json::Value,
        theta: &[f64],
        ys: &[f64],
        run: &ForecastRun,
        wallclock: Duration,
    ) -> Result<Self> {
        let n = theta.len();
        if ys.len() != n || run.predictions.len() != n || run.restarts.len() != n {
            return Err(Error::invalid(format!(
                "trace inputs disagree in length: theta {n}, y {}, x {}",
                ys.len(),
                run.predictions.len()
            )));
        }
        let rows = (0..n)
            .map(|i| {
                let x = run.predictions[i];
                TraceRow {
                    t: i + 1,
                    theta: theta[i],
                    y: ys[i],
                    x,
                    loss: (x - theta[i]).powi(2),
                    restart: run.restarts[i],
                }
            })
            .collect();
        Ok(Self {
            algo: algo.into(),
            seed,
            params,
            rows,
            num_bins: run.num_bins,
            wallclock,
        })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn predictions(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.x)
    }
}

/// Cumulative squared error against the trend.
///
/// Under squared loss the per-step comparator `inf_x (x - theta_t)^2` is zero,
/// so this is the dynamic regret.
pub fn dynamic_regret(trace: &TrialTrace) -> f64 {
    trace.rows.iter().map(|r| r.loss).collect::<CompensatedSum>().value()
}

/// Least-squares slope of `ln(regret)` against `ln(n)`.
pub fn scaling_slope(rows: &[(usize, f64)]) -> Result<f64> {
    if rows.len() < 3 {
        return Err(Error::invalid(format!("need at least 3 grid points, got {}", rows.len())));
    }
    if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::invalid("grid sizes must be strictly increasing"));
    }
    if let Some((n, r)) = rows.iter().find(|(_, r)| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::invalid(format!("regret at n = {n} must be positive, got {r}")));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, r)| ((n as f64).ln(), r.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Mean and sample standard deviation; zero deviation for fewer than two values.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, 0.0);
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt())
}

/// Multi-seed summary of one (algorithm, configuration, horizon) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub algo: String,
    pub n: usize,
    pub seeds: Vec<u64>,
    /// Per-realization regret, in seed order.
    pub regrets: Vec<f64>,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub num_bins: Vec<usize>,
    pub mean_wallclock_ms: f64,
}

pub fn aggregate_seeds(traces: &[TrialTrace]) -> Result<RegretReport> {
    let first = traces
        .first()
        .ok_or_else(|| Error::invalid("no traces to aggregate"))?;
    if let Some(odd) = traces
        .iter()
        .find(|t| t.algo != first.algo || t.params != first.params || t.n() != first.n())
    {
        return Err(Error::invalid(format!(
            "cannot aggregate {} (n = {}) with {} (n = {})",
            odd.algo,
            odd.n(),
            first.algo,
            first.n()
        )));
    }
    let regrets: Vec<f64> = traces.iter().map(dynamic_regret).collect();
    let (mean_regret, std_regret) = mean_and_std(&regrets);
    let mean_wallclock_ms =
        traces.iter().map(|t| t.wallclock.as_secs_f64() * 1e3).sum::<f64>() / traces.len() as f64;
    Ok(RegretReport {
        algo: first.algo.clone(),
        n: first.n(),
        seeds: traces.iter().map(|t| t.seed).collect(),
        regrets,
        mean_regret,
        std_regret,
        num_bins: traces.iter().map(|t| t.num_bins).collect(),
        mean_wallclock_ms,
    })
}
