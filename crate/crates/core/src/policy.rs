//! The ARROWS forecaster: online averaging within bins, with restarts
//! triggered by soft-thresholded Haar coefficients of the current bin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{run_forecaster, ForecastRun, Forecaster};
use crate::haar::{HaarState, ThresholdConfig};

pub const DEFAULT_DELTA: f64 = 0.1;

/// Floor of the default shrinkage exponent; also used for a one-step horizon
/// where the `1/ln n` term is undefined.
pub const BETA_FLOOR: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrowsConfig {
    pub n: usize,
    pub sigma: f64,
    pub delta: f64,
    pub beta_override: Option<f64>,
}

impl ArrowsConfig {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        let config = Self {
            n,
            sigma,
            delta: DEFAULT_DELTA,
            beta_override: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta_override = Some(beta);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("horizon must be >= 1"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1], got {}", self.delta)));
        }
        if let Some(beta) = self.beta_override {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::invalid(format!("beta must be finite and > 0, got {beta}")));
            }
        }
        Ok(())
    }

    /// `beta_override`, else `24 + 8 ln(8/delta) / ln n`.
    pub fn effective_beta(&self) -> f64 {
        match self.beta_override {
            Some(beta) => beta,
            None if self.n < 2 => BETA_FLOOR,
            None => BETA_FLOOR + 8.0 * (8.0 / self.delta).ln() / (self.n as f64).ln(),
        }
    }

    pub fn threshold(&self) -> ThresholdConfig {
        ThresholdConfig::new(self.sigma, self.effective_beta(), self.n)
            .expect("validated config yields a valid threshold")
    }

    pub fn lambda(&self) -> f64 {
        self.threshold().lambda()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub restarted: bool,
    pub statistic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Predict,
    Observe,
}

/// Closed interval of 1-based time indices.
pub type Bin = (usize, usize);

#[derive(Debug, Clone)]
pub struct ArrowsForecaster {
    config: ArrowsConfig,
    t: usize,
    bin_start: usize,
    new_bin: bool,
    last_y: f64,
    haar: HaarState,
    closed: Vec<Bin>,
    phase: Phase,
}

impl ArrowsForecaster {
    pub fn new(config: ArrowsConfig) -> Result<Self> {
        config.validate()?;
        if config.sigma == 0.0 {
            log::warn!("sigma = 0: any nonzero recentered coefficient will trigger a restart");
        }
        Ok(Self {
            haar: HaarState::new(config.threshold()),
            config,
            t: 1,
            bin_start: 1,
            new_bin: true,
            last_y: 0.0,
            closed: Vec::new(),
            phase: Phase::Predict,
        })
    }

    pub fn config(&self) -> &ArrowsConfig {
        &self.config
    }

    /// 1-based index of the step awaiting prediction or observation.
    pub fn time(&self) -> usize {
        self.t
    }

    pub fn bin_start(&self) -> usize {
        self.bin_start
    }

    pub fn is_new_bin(&self) -> bool {
        self.new_bin
    }

    pub fn haar(&self) -> &HaarState {
        &self.haar
    }

    pub fn closed_bins(&self) -> &[Bin] {
        &self.closed
    }

    /// Closed bins followed by the open bin, if it holds any observations.
    pub fn bins(&self) -> Vec<Bin> {
        let mut bins = self.closed.clone();
        if self.bin_start < self.t {
            bins.push((self.bin_start, self.t - 1));
        }
        bins
    }

    /// The value `predict` would return, without advancing the protocol.
    pub fn current_prediction(&self) -> f64 {
        if self.new_bin {
            self.last_y
        } else {
            self.haar.mean()
        }
    }

    pub fn step(&mut self, y: f64) -> Result<StepOutcome> {
        if self.t > self.config.n {
            return Err(Error::HorizonExceeded { n: self.config.n });
        }
        if self.phase != Phase::Observe {
            return Err(Error::ProtocolViolation("observe called before predict"));
        }
        if !y.is_finite() {
            return Err(Error::invalid(format!("non-finite observation {y}")));
        }
        self.new_bin = false;
        self.haar.append(y)?;
        let statistic = self.haar.statistic();
        let restarted = statistic > self.config.sigma;
        if restarted {
            self.closed.push((self.bin_start, self.t));
            self.bin_start = self.t + 1;
            self.new_bin = true;
            self.haar.clear();
        }
        self.last_y = y;
        self.t += 1;
        self.phase = Phase::Predict;
        Ok(StepOutcome {
            restarted,
            statistic,
        })
    }

    /// Runs a fresh forecaster over `ys`, which must have length `n`.
    pub fn run_horizon(&mut self, ys: &[f64]) -> Result<ForecastRun> {
        if self.t != 1 || self.phase != Phase::Predict {
            return Err(Error::ProtocolViolation("run_horizon needs a fresh forecaster"));
        }
        run_forecaster(self, ys)
    }
}

impl Forecaster for ArrowsForecaster {
    fn predict(&mut self) -> Result<f64> {
        if self.t > self.config.n {
            return Err(Error::HorizonExceeded { n: self.config.n });
        }
        if self.phase != Phase::Predict {
            return Err(Error::ProtocolViolation("predict called twice without observe"));
        }
        self.phase = Phase::Observe;
        Ok(self.current_prediction())
    }

    fn observe(&mut self, y: f64) -> Result<bool> {
        self.step(y).map(|o| o.restarted)
    }

    fn num_bins(&self) -> usize {
        self.closed.len() + usize::from(self.bin_start < self.t)
    }

    fn horizon(&self) -> usize {
        self.config.n
    }
}

/// Upper bound on the number of bins, `max(1, 2 n^(1/3) C^(2/3) sigma^(-2/3) ln n)`.
pub fn bin_count_bound(n: usize, total_variation: f64, sigma: f64) -> f64 {
    let nf = n as f64;
    let raw = 2.0 * nf.cbrt() * total_variation.powf(2.0 / 3.0) * sigma.powf(-2.0 / 3.0) * nf.ln();
    if raw.is_nan() {
        1.0
    } else {
        raw.max(1.0)
    }
}
