//! Linear forecasters: restarting online averaging (OGD under squared loss with
//! a fixed batch schedule) and a trailing moving average, plus the tuned
//! batch and window sizes for TV and Sobolev classes.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{run_forecaster, ForecastRun, Forecaster};

fn check_tuning_inputs(n: usize, sigma: f64, radius: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("horizon must be >= 1"));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if !(radius > 0.0) || radius.is_nan() {
        return Err(Error::invalid(format!("variation radius must be > 0, got {radius}")));
    }
    Ok(())
}

fn round_clamped(value: f64, n: usize) -> usize {
    let rounded = value.round();
    if rounded.is_nan() || rounded < 1.0 {
        1
    } else if rounded >= n as f64 {
        n
    } else {
        rounded as usize
    }
}

/// `round(sqrt(n ln n) * sigma / c_n)` clamped to `[1, n]`.
pub fn ogd_batch_size_tv(n: usize, sigma: f64, c_n: f64) -> Result<usize> {
    check_tuning_inputs(n, sigma, c_n)?;
    let nf = n as f64;
    Ok(round_clamped((nf * nf.ln()).sqrt() * sigma / c_n, n))
}

/// `round(sigma^(2/3) (n ln n)^(1/3) / c_n'^(2/3))` clamped to `[1, n]`.
pub fn ogd_batch_size_sobolev(n: usize, sigma: f64, c_n_prime: f64) -> Result<usize> {
    check_tuning_inputs(n, sigma, c_n_prime)?;
    let nf = n as f64;
    let value = sigma.powf(2.0 / 3.0) * (nf * nf.ln()).cbrt() / c_n_prime.powf(2.0 / 3.0);
    Ok(round_clamped(value, n))
}

/// `round(sigma sqrt(n) / c_n)` clamped to `[1, n]`.
pub fn ma_window_tv(n: usize, sigma: f64, c_n: f64) -> Result<usize> {
    check_tuning_inputs(n, sigma, c_n)?;
    Ok(round_clamped(sigma * (n as f64).sqrt() / c_n, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OgdConfig {
    pub batch_size: usize,
    pub n: usize,
}

impl OgdConfig {
    pub fn new(batch_size: usize, n: usize) -> Result<Self> {
        if batch_size == 0 || batch_size > n {
            return Err(Error::invalid(format!("batch size {batch_size} outside [1, {n}]")));
        }
        Ok(Self { batch_size, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaConfig {
    pub window: usize,
    pub n: usize,
}

impl MaConfig {
    pub fn new(window: usize, n: usize) -> Result<Self> {
        if window == 0 || window > n {
            return Err(Error::invalid(format!("window {window} outside [1, {n}]")));
        }
        Ok(Self { window, n })
    }
}

/// Online averaging restarted at fixed multiples of the batch size.
///
/// The first prediction of each batch is the previous observation (zero at `t = 1`).
#[derive(Debug, Clone)]
pub struct RestartingOgd {
    config: OgdConfig,
    t: usize,
    batch_sum: f64,
    batch_count: usize,
    last_y: f64,
}

impl RestartingOgd {
    pub fn new(config: OgdConfig) -> Self {
        Self {
            config,
            t: 1,
            batch_sum: 0.0,
            batch_count: 0,
            last_y: 0.0,
        }
    }
}

impl Forecaster for RestartingOgd {
    fn predict(&mut self) -> Result<f64> {
        if self.t > self.config.n {
            return Err(Error::HorizonExceeded { n: self.config.n });
        }
        Ok(if self.batch_count == 0 {
            self.last_y
        } else {
            self.batch_sum / self.batch_count as f64
        })
    }

    fn observe(&mut self, y: f64) -> Result<bool> {
        if self.t > self.config.n {
            return Err(Error::HorizonExceeded { n: self.config.n });
        }
        if !y.is_finite() {
            return Err(Error::invalid(format!("non-finite observation {y}")));
        }
        self.batch_sum += y;
        self.batch_count += 1;
        self.last_y = y;
        let closes = self.t.is_multiple_of(self.config.batch_size);
        if closes {
            self.batch_sum = 0.0;
            self.batch_count = 0;
        }
        self.t += 1;
        Ok(closes)
    }

    fn num_bins(&self) -> usize {
        (self.t - 1).div_ceil(self.config.batch_size)
    }

    fn horizon(&self) -> usize {
        self.config.n
    }
}

/// Mean of the last `window` observations; an expanding mean while fewer are available.
#[derive(Debug, Clone)]
pub struct MovingAverage {
    config: MaConfig,
    t: usize,
    window: VecDeque<f64>,
    sum: f64,
    since_refresh: usize,
}

impl MovingAverage {
    pub fn new(config: MaConfig) -> Self {
        Self {
            config,
            t: 1,
            window: VecDeque::with_capacity(config.window + 1),
            sum: 0.0,
            since_refresh: 0,
        }
    }
}

impl Forecaster for MovingAverage {
    fn predict(&mut self) -> Result<f64> {
        if self.t > self.config.n {
            return Err(Error::HorizonExceeded { n: self.config.n });
        }
        Ok(if self.window.is_empty() {
            0.0
        } else {
            self.sum / self.window.len() as f64
        })
    }

    fn observe(&mut self, y: f64) -> Result<bool> {
        if self.t > self.config.n {
            return Err(Error::HorizonExceeded { n: self.config.n });
        }
        if !y.is_finite() {
            return Err(Error::invalid(format!("non-finite observation {y}")));
        }
        self.window.push_back(y);
        self.sum += y;
        if self.window.len() > self.config.window {
            let dropped = self.window.pop_front().expect("window is non-empty");
            self.sum -= dropped;
        }
        // bound add/subtract drift by re-summing once per window length
        self.since_refresh += 1;
        if self.since_refresh >= self.config.window {
            self.sum = self.window.iter().sum();
            self.since_refresh = 0;
        }
        self.t += 1;
        Ok(false)
    }

    fn num_bins(&self) -> usize {
        0
    }

    fn horizon(&self) -> usize {
        self.config.n
    }
}

pub fn run_ogd(config: OgdConfig, ys: &[f64]) -> Result<ForecastRun> {
    run_forecaster(&mut RestartingOgd::new(config), ys)
}

pub fn run_ma(config: MaConfig, ys: &[f64]) -> Result<ForecastRun> {
    run_forecaster(&mut MovingAverage::new(config), ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tuned_sizes() {
        assert_eq!(ogd_batch_size_tv(10_000, 1.0, 1.0).unwrap(), 303);
        assert_eq!(ogd_batch_size_sobolev(10_000, 1.0, 1.0).unwrap(), 45);
        assert_eq!(ma_window_tv(10_000, 1.0, 1.0).unwrap(), 100);
    }

    #[test]
    fn tuned_sizes_clamp() {
        assert_eq!(ogd_batch_size_tv(10_000, 0.0, 1.0).unwrap(), 1);
        assert_eq!(ogd_batch_size_tv(10_000, 1.0, 1e12).unwrap(), 1);
        assert_eq!(ogd_batch_size_sobolev(10_000, 0.0, 1.0).unwrap(), 1);
        assert_eq!(ogd_batch_size_sobolev(10_000, 1.0, 1e12).unwrap(), 1);
        assert_eq!(ma_window_tv(4, 2.0, 1.0).unwrap(), 4);
        assert_eq!(ma_window_tv(10_000, 1.0, 1e12).unwrap(), 1);
        assert_eq!(ogd_batch_size_tv(50, 10.0, 1e-9).unwrap(), 50);
    }

    #[test]
    fn tuned_sizes_reject_bad_radius() {
        assert!(matches!(ogd_batch_size_tv(10, 1.0, 0.0), Err(Error::InvalidArgument(_))));
        assert!(ogd_batch_size_sobolev(10, 1.0, -1.0).is_err());
        assert!(ma_window_tv(10, 1.0, f64::NAN).is_err());
        assert!(ma_window_tv(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn configs_validate() {
        assert!(OgdConfig::new(0, 5).is_err());
        assert!(OgdConfig::new(6, 5).is_err());
        assert!(MaConfig::new(0, 5).is_err());
        assert!(MaConfig::new(5, 5).is_ok());
    }

    #[test]
    fn ogd_examples() {
        let c = 2.5;
        let run = run_ogd(OgdConfig::new(6, 6).unwrap(), &[c; 6]).unwrap();
        assert_eq!(run.predictions, vec![0.0, c, c, c, c, c]);

        let ys = [1.0, -3.0, 4.0, 2.0];
        let run = run_ogd(OgdConfig::new(1, 4).unwrap(), &ys).unwrap();
        assert_eq!(run.predictions, vec![0.0, 1.0, -3.0, 4.0]);

        let run = run_ogd(OgdConfig::new(2, 4).unwrap(), &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert_eq!(run.predictions, vec![0.0, 1.0, 3.0, 5.0]);
        assert_eq!(run.restarts, vec![false, true, false, true]);
        assert_eq!(run.num_bins, 2);
    }

    #[test]
    fn ogd_boundaries_ignore_data() {
        let a = run_ogd(OgdConfig::new(7, 40).unwrap(), &[0.0; 40]).unwrap();
        let ys: Vec<f64> = (0..40).map(|i| (i * i) as f64).collect();
        let b = run_ogd(OgdConfig::new(7, 40).unwrap(), &ys).unwrap();
        assert_eq!(a.restarts, b.restarts);
        assert_eq!(a.num_bins, 6);
    }

    #[test]
    fn ma_examples() {
        let ys = [4.0, 1.0, 9.0];
        let run = run_ma(MaConfig::new(1, 3).unwrap(), &ys).unwrap();
        assert_eq!(run.predictions, vec![0.0, 4.0, 1.0]);

        let run = run_ma(MaConfig::new(2, 3).unwrap(), &[2.0, 4.0, 6.0]).unwrap();
        assert_eq!(run.predictions, vec![0.0, 2.0, 3.0]);

        let run = run_ma(MaConfig::new(3, 8).unwrap(), &[1.5; 8]).unwrap();
        assert!(run.predictions[1..].iter().all(|&x| x == 1.5));
    }

    #[test]
    fn length_mismatch() {
        assert!(run_ogd(OgdConfig::new(2, 4).unwrap(), &[1.0; 3]).is_err());
        assert!(run_ma(MaConfig::new(2, 4).unwrap(), &[1.0; 5]).is_err());
    }

    proptest! {
        #[test]
        fn ma_matches_window_mean(ys in prop::collection::vec(-10.0f64..10.0, 1..400), m in 1usize..40) {
            let m = m.min(ys.len());
            let run = run_ma(MaConfig::new(m, ys.len()).unwrap(), &ys).unwrap();
            for t in 2..=ys.len() {
                let lo = (t - 1).saturating_sub(m);
                let window = &ys[lo..t - 1];
                let exact = window.iter().sum::<f64>() / window.len() as f64;
                prop_assert!((run.predictions[t - 1] - exact).abs() <= 1e-12);
            }
        }
    }
}
