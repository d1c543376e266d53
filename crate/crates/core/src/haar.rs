//! Orthonormal Haar transform of recentered, zero-padded bins.
//!
//! Coefficients are stored level-major with 0-based indices: `alpha[0]` is the
//! scaling coefficient and the detail coefficient for block `j` at level `l`
//! lives at `alpha[2^l + j]`. Level 0 is the coarsest (a single block spanning
//! the whole padded vector); level `log2(k) - 1` holds the finest pairs.
//!
//! Sign convention: a detail coefficient is `(sum(left half) - sum(right half)) / sqrt(w)`
//! where `w` is the block width, i.e. it is proportional to the left-half mean
//! minus the right-half mean.

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Gaussian consistency constant for the median absolute deviation.
pub const MAD_CONSTANT: f64 = 0.6745;

/// A bin of observations after mean subtraction and zero padding to a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedVector {
    values: Vec<f64>,
    original_len: usize,
    mean: f64,
}

impl PaddedVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn original_len(&self) -> usize {
        self.original_len
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Padded length, always a power of two.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Subtracts the sample mean and zero-pads to the next power of two.
pub fn pad_and_recenter(raw: &[f64]) -> Result<PaddedVector> {
    if raw.is_empty() {
        return Err(Error::invalid("cannot pad an empty bin"));
    }
    if let Some(bad) = raw.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite observation {bad}")));
    }
    let mean = raw.iter().copied().collect::<CompensatedSum>().value() / raw.len() as f64;
    let k = raw.len().next_power_of_two();
    let mut values = Vec::with_capacity(k);
    values.extend(raw.iter().map(|v| v - mean));
    values.resize(k, 0.0);
    Ok(PaddedVector {
        values,
        original_len: raw.len(),
        mean,
    })
}

/// Haar coefficient vector of length `k` (a power of two).
#[derive(Debug, Clone, PartialEq)]
pub struct HaarCoefficients {
    alpha: Vec<f64>,
}

impl HaarCoefficients {
    pub fn from_vec(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || !alpha.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "coefficient vector length {} is not a power of two",
                alpha.len()
            )));
        }
        Ok(Self { alpha })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn scaling(&self) -> f64 {
        self.alpha[0]
    }

    /// Number of detail levels, `log2(k)`.
    pub fn levels(&self) -> usize {
        self.alpha.len().trailing_zeros() as usize
    }

    /// The `2^l` detail coefficients of level `l`.
    pub fn level(&self, l: usize) -> &[f64] {
        let start = 1usize << l;
        &self.alpha[start..2 * start]
    }

    pub fn norm(&self) -> f64 {
        self.alpha.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

/// Writes `sum(left) - sum(right)` for every dyadic block of `values` into
/// `out` using the coefficient layout above; `out[0]` receives the total.
fn block_differences(values: &[f64], out: &mut [f64]) {
    debug_assert!(values.len().is_power_of_two());
    debug_assert_eq!(values.len(), out.len());
    let mut sums = values.to_vec();
    let mut width = sums.len();
    while width > 1 {
        let half = width / 2;
        for j in 0..half {
            let (a, b) = (sums[2 * j], sums[2 * j + 1]);
            out[half + j] = a - b;
            sums[j] = a + b;
        }
        width = half;
    }
    out[0] = sums[0];
}

/// Orthonormal Haar transform of a vector whose length is a power of two.
pub fn haar_forward_slice(values: &[f64]) -> Result<HaarCoefficients> {
    let k = values.len();
    if k == 0 || !k.is_power_of_two() {
        return Err(Error::invalid(format!("length {k} is not a power of two")));
    }
    let mut alpha = vec![0.0; k];
    block_differences(values, &mut alpha);
    alpha[0] /= (k as f64).sqrt();
    let levels = k.trailing_zeros() as usize;
    for l in 0..levels {
        let scale = ((k >> l) as f64).sqrt().recip();
        for a in &mut alpha[1 << l..2 << l] {
            *a *= scale;
        }
    }
    Ok(HaarCoefficients { alpha })
}

pub fn haar_forward(x: &PaddedVector) -> HaarCoefficients {
    haar_forward_slice(&x.values).expect("padded vectors have power-of-two length")
}

#[inline]
pub fn soft(value: f64, lambda: f64) -> f64 {
    let mag = value.abs() - lambda;
    if mag > 0.0 {
        mag.copysign(value)
    } else {
        0.0
    }
}

pub fn soft_threshold(alpha: &HaarCoefficients, lambda: f64) -> Result<HaarCoefficients> {
    if !(lambda >= 0.0) {
        return Err(Error::invalid(format!("threshold must be >= 0, got {lambda}")));
    }
    Ok(HaarCoefficients {
        alpha: alpha.alpha.iter().map(|&a| soft(a, lambda)).collect(),
    })
}

#[inline]
fn level_weight(l: usize) -> f64 {
    (l as f64 * 0.5).exp2()
}

/// `sum_l 2^(l/2) * ||shrunk[l]||_1` over the detail levels.
///
/// The `1/sqrt(k)` factor on both sides of the restart inequality cancels, so a
/// bin restarts when this value exceeds `sigma`. With `k = 1` there are no
/// detail levels and the statistic is zero.
pub fn restart_statistic(shrunk: &HaarCoefficients) -> f64 {
    (0..shrunk.levels())
        .map(|l| level_weight(l) * shrunk.level(l).iter().map(|a| a.abs()).sum::<f64>())
        .sum()
}

/// Shrinkage parameters; `lambda = sigma * sqrt(beta * ln n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    sigma: f64,
    beta: f64,
    n: usize,
}

impl ThresholdConfig {
    pub fn new(sigma: f64, beta: f64, n: usize) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::invalid(format!("beta must be finite and > 0, got {beta}")));
        }
        if n == 0 {
            return Err(Error::invalid("horizon must be >= 1"));
        }
        Ok(Self { sigma, beta, n })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.sigma * (self.beta * (self.n as f64).ln()).sqrt()
    }
}

/// Incrementally maintained Haar coefficients of the current bin.
///
/// For a bin of `count` observations padded to `pivot`, the recentered vector is
/// the padded raw data minus a step equal to the bin mean on the occupied
/// prefix. The engine keeps the block differences of the padded raw data; the
/// step contributes `mean * (occupied(left) - occupied(right))`, which is
/// nonzero only for the block holding the last occupied slot on each level. An
/// append therefore touches the scaling coefficient plus one block per level.
/// When `count` outgrows the pivot the pivot doubles and everything is rebuilt
/// from the raw buffer, which also resets accumulated rounding error.
#[derive(Debug, Clone)]
pub struct HaarState {
    threshold: ThresholdConfig,
    lambda: f64,
    raw: Vec<f64>,
    pivot: usize,
    diffs: Vec<f64>,
    alpha: Vec<f64>,
    sum: CompensatedSum,
    statistic: f64,
    writes: u64,
}

impl HaarState {
    pub fn new(threshold: ThresholdConfig) -> Self {
        Self {
            lambda: threshold.lambda(),
            threshold,
            raw: Vec::new(),
            pivot: 1,
            diffs: vec![0.0],
            alpha: vec![0.0],
            sum: CompensatedSum::default(),
            statistic: 0.0,
            writes: 0,
        }
    }

    pub fn threshold(&self) -> &ThresholdConfig {
        &self.threshold
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn count(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn running_sum(&self) -> f64 {
        self.sum.value()
    }

    /// Mean of the bin so far; zero for an empty bin.
    pub fn mean(&self) -> f64 {
        if self.raw.is_empty() {
            0.0
        } else {
            self.sum.mean(self.raw.len())
        }
    }

    /// Unshrunk coefficients of the recentered, padded bin (length `pivot`).
    pub fn coefficients(&self) -> HaarCoefficients {
        HaarCoefficients {
            alpha: self.alpha.clone(),
        }
    }

    pub fn shrunk_coefficients(&self) -> HaarCoefficients {
        HaarCoefficients {
            alpha: self.alpha.iter().map(|&a| soft(a, self.lambda)).collect(),
        }
    }

    /// Restart statistic of the soft-thresholded coefficients.
    pub fn statistic(&self) -> f64 {
        self.statistic.max(0.0)
    }

    /// Total coefficient writes since construction; instrumentation for cost tests.
    pub fn coefficient_writes(&self) -> u64 {
        self.writes
    }

    /// Empties the bin while keeping buffers allocated.
    pub fn clear(&mut self) {
        self.raw.clear();
        self.pivot = 1;
        self.diffs.clear();
        self.diffs.push(0.0);
        self.alpha.clear();
        self.alpha.push(0.0);
        self.sum = CompensatedSum::default();
        self.statistic = 0.0;
    }

    pub fn append(&mut self, y: f64) -> Result<()> {
        if !y.is_finite() {
            return Err(Error::invalid(format!("non-finite observation {y}")));
        }
        self.raw.push(y);
        self.sum.add(y);
        if self.raw.len() > self.pivot {
            while self.pivot < self.raw.len() {
                self.pivot *= 2;
            }
            self.rebuild();
            return Ok(());
        }

        let count = self.raw.len();
        let pos = count - 1;
        let mean = self.mean();
        let p = self.pivot;

        self.diffs[0] += y;
        self.alpha[0] = (self.sum.value() - mean * count as f64) / (p as f64).sqrt();
        self.writes += 1;

        let levels = p.trailing_zeros() as usize;
        for l in 0..levels {
            let width = p >> l;
            let j = pos / width;
            let idx = (1 << l) + j;
            if pos % width < width / 2 {
                self.diffs[idx] += y;
            } else {
                self.diffs[idx] -= y;
            }
            let value = (self.diffs[idx] - mean * occupancy_difference(j, width, count))
                / (width as f64).sqrt();
            let weight = level_weight(l);
            self.statistic += weight
                * (soft(value, self.lambda).abs() - soft(self.alpha[idx], self.lambda).abs());
            self.alpha[idx] = value;
            self.writes += 1;
        }
        Ok(())
    }

    fn rebuild(&mut self) {
        let p = self.pivot;
        let count = self.raw.len();
        let mean = self.mean();
        let mut padded = Vec::with_capacity(p);
        padded.extend_from_slice(&self.raw);
        padded.resize(p, 0.0);
        self.diffs.resize(p, 0.0);
        block_differences(&padded, &mut self.diffs);

        self.alpha.resize(p, 0.0);
        self.alpha[0] = (self.sum.value() - mean * count as f64) / (p as f64).sqrt();
        let mut statistic = 0.0;
        for l in 0..p.trailing_zeros() as usize {
            let width = p >> l;
            let scale = (width as f64).sqrt().recip();
            let mut level_sum = 0.0;
            for j in 0..(1 << l) {
                let idx = (1 << l) + j;
                let value = (self.diffs[idx] - mean * occupancy_difference(j, width, count)) * scale;
                self.alpha[idx] = value;
                level_sum += soft(value, self.lambda).abs();
            }
            statistic += level_weight(l) * level_sum;
        }
        self.statistic = statistic;
        self.writes += p as u64;
    }
}

/// Occupied slots in the left half minus the right half of block `j` at width `width`.
#[inline]
fn occupancy_difference(j: usize, width: usize, count: usize) -> f64 {
    let half = width / 2;
    let start = j * width;
    let left = count.saturating_sub(start).min(half);
    let right = count.saturating_sub(start + half).min(half);
    left as f64 - right as f64
}

/// Noise scale from the median absolute finest-scale Haar detail coefficient.
///
/// Consecutive pairs `(y[2i], y[2i+1])` give coefficients `(a - b) / sqrt(2)`;
/// a trailing unpaired observation is ignored.
pub fn estimate_sigma_mad(observations: &[f64]) -> Result<f64> {
    if observations.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 observations to estimate sigma, got {}",
            observations.len()
        )));
    }
    if observations.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite observation"));
    }
    let mut details: Vec<f64> = observations
        .chunks_exact(2)
        .map(|pair| ((pair[0] - pair[1]) / std::f64::consts::SQRT_2).abs())
        .collect();
    Ok(median(&mut details) / MAD_CONSTANT)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len().is_multiple_of(2) {
        0.5 * (values[mid - 1] + values[mid])
    } else {
        values[mid]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense orthonormal Haar matrix built row by row from the basis definition.
    fn dense_haar(k: usize) -> Vec<Vec<f64>> {
        let mut rows = vec![vec![1.0 / (k as f64).sqrt(); k]];
        let mut l = 0;
        while (1 << l) < k {
            let width = k >> l;
            let c = 1.0 / (width as f64).sqrt();
            for j in 0..(1 << l) {
                let mut row = vec![0.0; k];
                for (i, r) in row.iter_mut().enumerate().skip(j * width).take(width) {
                    *r = if i < j * width + width / 2 { c } else { -c };
                }
                rows.push(row);
            }
            l += 1;
        }
        rows
    }

    fn matvec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (i, (x, y)) in a.iter().zip(b).enumerate() {
            assert!((x - y).abs() <= tol, "index {i}: {x} vs {y}");
        }
    }

    #[test]
    fn pad_examples() {
        let p = pad_and_recenter(&[3.0, 5.0]).unwrap();
        assert_eq!(p.values(), &[-1.0, 1.0]);
        assert_eq!(p.mean(), 4.0);

        let p = pad_and_recenter(&[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(p.values(), &[0.0; 4]);
        assert_eq!(p.mean(), 4.0);
        assert_eq!(p.original_len(), 3);

        let p = pad_and_recenter(&[0.0, 0.0, 10.0, 10.0]).unwrap();
        assert_eq!(p.values(), &[-5.0, -5.0, 5.0, 5.0]);
        assert_eq!(p.mean(), 5.0);
    }

    #[test]
    fn pad_rejects_empty_and_nan() {
        assert!(matches!(pad_and_recenter(&[]), Err(Error::InvalidArgument(_))));
        assert!(pad_and_recenter(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn pad_invariants_on_odd_lengths() {
        let raw: Vec<f64> = (0..37).map(|i| (i as f64 * 0.7).sin() * 3.0 + 1.0).collect();
        let p = pad_and_recenter(&raw).unwrap();
        assert_eq!(p.len(), 64);
        let prefix: f64 = p.values()[..37].iter().sum();
        assert!(prefix.abs() < 1e-9);
        assert!(p.values()[37..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forward_examples() {
        let z = haar_forward(&pad_and_recenter(&[7.0, 7.0]).unwrap());
        assert_eq!(z.as_slice(), &[0.0, 0.0]);

        let a = haar_forward_slice(&[-1.0, 1.0]).unwrap();
        assert_close(a.as_slice(), &[0.0, -std::f64::consts::SQRT_2], 1e-12);

        let a = haar_forward_slice(&[-5.0, -5.0, 5.0, 5.0]).unwrap();
        assert_close(a.as_slice(), &[0.0, -10.0, 0.0, 0.0], 1e-12);
    }

    #[test]
    fn forward_matches_dense_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [1usize, 2, 4, 8, 16, 64, 256] {
            let x: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..5.0)).collect();
            let fast = haar_forward_slice(&x).unwrap();
            assert_close(fast.as_slice(), &matvec(&dense_haar(k), &x), 1e-9);
        }
    }

    #[test]
    fn dense_matrix_is_orthonormal() {
        for k in [1usize, 2, 4, 8, 16, 32, 64, 128, 256] {
            let h = dense_haar(k);
            for (i, a) in h.iter().enumerate() {
                for (j, b) in h.iter().enumerate() {
                    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expected).abs() < 1e-9, "k={k} ({i},{j}) = {dot}");
                }
            }
        }
    }

    #[test]
    fn forward_rejects_bad_length() {
        assert!(haar_forward_slice(&[1.0, 2.0, 3.0]).is_err());
        assert!(haar_forward_slice(&[]).is_err());
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft(5.0, 2.0), 3.0);
        assert_eq!(soft(-1.0, 2.0), 0.0);
        assert_eq!(soft(0.0, 0.0), 0.0);
        assert_eq!(soft(-5.0, 2.0), -3.0);
        let a = HaarCoefficients::from_vec(vec![0.0, 1.0]).unwrap();
        assert!(matches!(soft_threshold(&a, -0.1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn statistic_examples() {
        let zero = HaarCoefficients::from_vec(vec![0.0; 8]).unwrap();
        assert_eq!(restart_statistic(&zero), 0.0);
        let s = HaarCoefficients::from_vec(vec![0.0, -7.0, 0.0, 0.0]).unwrap();
        assert_eq!(restart_statistic(&s), 7.0);
        let s = HaarCoefficients::from_vec(vec![0.0, 3.0]).unwrap();
        assert_eq!(restart_statistic(&s), 3.0);
        let single = HaarCoefficients::from_vec(vec![4.0]).unwrap();
        assert_eq!(restart_statistic(&single), 0.0);
        // level 1 weight is sqrt(2)
        let s = HaarCoefficients::from_vec(vec![0.0, 0.0, 1.0, -1.0]).unwrap();
        assert!((restart_statistic(&s) - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn threshold_config_lambda() {
        let c = ThresholdConfig::new(2.0, 25.0, 100).unwrap();
        assert!((c.lambda() - 2.0 * (25.0 * 100f64.ln()).sqrt()).abs() < 1e-12);
        assert_eq!(ThresholdConfig::new(1.0, 25.0, 1).unwrap().lambda(), 0.0);
        assert!(ThresholdConfig::new(-1.0, 25.0, 10).is_err());
        assert!(ThresholdConfig::new(1.0, 0.0, 10).is_err());
        assert!(ThresholdConfig::new(1.0, 1.0, 0).is_err());
    }

    fn state(lambda_sigma: f64) -> HaarState {
        HaarState::new(ThresholdConfig::new(lambda_sigma, 25.0, 1000).unwrap())
    }

    fn assert_matches_batch(s: &HaarState, tol: f64) {
        let batch = haar_forward(&pad_and_recenter(s.raw()).unwrap());
        assert_close(s.coefficients().as_slice(), batch.as_slice(), tol);
        let stat = restart_statistic(&soft_threshold(&batch, s.lambda()).unwrap());
        assert!((s.statistic() - stat).abs() < tol, "{} vs {stat}", s.statistic());
    }

    #[test]
    fn incremental_examples() {
        let mut s = state(1.0);
        for y in [4.0, 4.0, 4.0] {
            s.append(y).unwrap();
        }
        assert!(s.coefficients().as_slice().iter().all(|a| a.abs() < 1e-12));
        assert_eq!(s.statistic(), 0.0);

        let mut s = state(1.0);
        for y in [0.0, 0.0, 10.0, 10.0] {
            s.append(y).unwrap();
        }
        assert_close(s.coefficients().as_slice(), &[0.0, -10.0, 0.0, 0.0], 1e-12);
        assert_eq!(s.pivot(), 4);
    }

    #[test]
    fn bin_statistic_against_threshold() {
        // n = 100, beta chosen so that lambda = 3 (and 20) with sigma = 1
        let at = |lambda: f64| {
            let beta = lambda * lambda / 100f64.ln();
            let mut s = HaarState::new(ThresholdConfig::new(1.0, beta, 100).unwrap());
            for y in [0.0, 0.0, 10.0, 10.0] {
                s.append(y).unwrap();
            }
            s.statistic()
        };
        assert!((at(3.0) - 7.0).abs() < 1e-9);
        assert_eq!(at(20.0), 0.0);
    }

    #[test]
    fn incremental_rejects_non_finite() {
        let mut s = state(1.0);
        assert!(s.append(f64::INFINITY).is_err());
        assert!(s.is_empty());
    }

    #[test]
    fn incremental_matches_batch_every_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = state(0.3);
        for step in 0..1000 {
            let y = if step % 97 < 40 { 3.0 } else { -1.0 } + rng.random_range(-1.0..1.0);
            s.append(y).unwrap();
            assert_matches_batch(&s, 1e-9);
            assert_eq!(s.pivot(), s.count().next_power_of_two());
        }
    }

    #[test]
    fn clear_resets_bin() {
        let mut s = state(0.1);
        for y in [1.0, 5.0, -2.0, 8.0, 3.0] {
            s.append(y).unwrap();
        }
        s.clear();
        assert!(s.is_empty());
        assert_eq!(s.mean(), 0.0);
        for y in [2.0, 2.0, 9.0] {
            s.append(y).unwrap();
        }
        assert_matches_batch(&s, 1e-12);
    }

    #[test]
    fn writes_are_near_linear() {
        let mut s = state(1.0);
        let n = 1usize << 14;
        for i in 0..n {
            s.append((i as f64 * 0.01).sin()).unwrap();
        }
        let bound = 3.0 * n as f64 * (n as f64).log2();
        assert!((s.coefficient_writes() as f64) <= bound);
    }

    #[test]
    fn mad_examples() {
        assert_eq!(estimate_sigma_mad(&[2.5; 10]).unwrap(), 0.0);
        let c = 3.0;
        let alt: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 0.0 } else { c }).collect();
        let expected = (c / std::f64::consts::SQRT_2) / MAD_CONSTANT;
        assert!((estimate_sigma_mad(&alt).unwrap() - expected).abs() < 1e-12);
        assert!(matches!(estimate_sigma_mad(&[1.0]), Err(Error::InvalidArgument(_))));
    }

    proptest! {
        #[test]
        fn parseval(x in prop::collection::vec(-100.0f64..100.0, 1..=6usize).prop_flat_map(|seed| {
            let k = 1usize << seed.len();
            prop::collection::vec(-100.0f64..100.0, k)
        })) {
            let a = haar_forward_slice(&x).unwrap();
            let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((a.norm() - norm_x).abs() < 1e-9);
        }

        #[test]
        fn shrinkage_dominates(x in prop::collection::vec(-50.0f64..50.0, 16), lambda in 0.0f64..60.0) {
            let a = HaarCoefficients::from_vec(x).unwrap();
            let s = soft_threshold(&a, lambda).unwrap();
            for (u, v) in a.as_slice().iter().zip(s.as_slice()) {
                prop_assert!(v.abs() <= u.abs());
            }
        }

        #[test]
        fn recentering_zeroes_scaling(raw in prop::collection::vec(-1e3f64..1e3, 1..200)) {
            let a = haar_forward(&pad_and_recenter(&raw).unwrap());
            prop_assert!(a.scaling().abs() < 1e-9);
        }

        #[test]
        fn incremental_equals_batch(raw in prop::collection::vec(-20.0f64..20.0, 1..150), sigma in 0.0f64..2.0) {
            let mut s = state(sigma);
            for &y in &raw {
                s.append(y).unwrap();
            }
            assert_matches_batch(&s, 1e-9);
        }
    }
}
