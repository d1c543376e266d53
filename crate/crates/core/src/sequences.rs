//! Ground-truth trends and the seeded observation channel.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

pub const DEFAULT_DOPPLER_EPSILON: f64 = 0.05;
pub const DOPPLER_OFFSET: f64 = 0.38;
pub const SOBOLEV_DOPPLER_OFFSET: f64 = 0.01;

/// Control points of the cubic-spline half of the hybrid trend.
///
/// Knots sit on `[0, 1]` with gaps shrinking geometrically by `ratio`, so they
/// crowd toward the right end. Control values alternate `+amplitude`, `-amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineKnots {
    pub count: usize,
    pub ratio: f64,
    pub amplitude: f64,
}

impl Default for SplineKnots {
    fn default() -> Self {
        Self {
            count: 8,
            ratio: 0.7,
            amplitude: 1.0,
        }
    }
}

/// A named trend family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    Doppler {
        epsilon: f64,
        offset: f64,
    },
    Hybrid {
        knots: SplineKnots,
        epsilon: f64,
    },
    /// `breakpoints` are 1-based indices where the next level starts; evenly
    /// spaced when absent.
    Step {
        levels: Vec<f64>,
        breakpoints: Option<Vec<usize>>,
    },
    Linear {
        slope_total: f64,
    },
    Constant {
        value: f64,
    },
}

impl Generator {
    pub fn doppler() -> Self {
        Generator::Doppler {
            epsilon: DEFAULT_DOPPLER_EPSILON,
            offset: DOPPLER_OFFSET,
        }
    }

    pub fn sobolev_doppler() -> Self {
        Generator::Doppler {
            epsilon: DEFAULT_DOPPLER_EPSILON,
            offset: SOBOLEV_DOPPLER_OFFSET,
        }
    }

    pub fn hybrid() -> Self {
        Generator::Hybrid {
            knots: SplineKnots::default(),
            epsilon: DEFAULT_DOPPLER_EPSILON,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Generator::Doppler { .. } => "doppler",
            Generator::Hybrid { .. } => "hybrid",
            Generator::Step { .. } => "step",
            Generator::Linear { .. } => "linear",
            Generator::Constant { .. } => "constant",
        }
    }

    pub fn generate(&self, n: usize) -> Result<GroundTruth> {
        match self {
            Generator::Doppler { epsilon, offset } => gen_doppler(n, *epsilon, *offset),
            Generator::Hybrid { knots, epsilon } => gen_hybrid(n, *knots, *epsilon),
            Generator::Step {
                levels,
                breakpoints: Some(b),
            } => gen_step(n, levels, b),
            Generator::Step {
                levels,
                breakpoints: None,
            } => gen_step(n, levels, &even_breakpoints(n, levels.len())?),
            Generator::Linear { slope_total } => gen_linear(n, *slope_total),
            Generator::Constant { value } => gen_constant(n, *value),
        }
    }
}

/// A trend `theta_1..theta_n` with its difference norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub theta: Vec<f64>,
    /// `||D theta||_1`
    pub tv: f64,
    /// `||D theta||_2`
    pub sobolev: f64,
    /// `max |theta_i|`
    pub sup: f64,
    pub label: Generator,
}

impl GroundTruth {
    pub fn new(theta: Vec<f64>, label: Generator) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("ground truth must have at least one point"));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("ground truth has non-finite values"));
        }
        let (tv, sobolev) = difference_norms(&theta);
        let sup = theta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self {
            theta,
            tv,
            sobolev,
            sup,
            label,
        })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// `(||D theta||_1, ||D theta||_2)`.
pub fn difference_norms(theta: &[f64]) -> (f64, f64) {
    let mut l1 = CompensatedSum::default();
    let mut l2 = CompensatedSum::default();
    for w in theta.windows(2) {
        let d = w[1] - w[0];
        l1.add(d.abs());
        l2.add(d * d);
    }
    (l1.value(), l2.value().sqrt())
}

fn doppler_values(n: usize, epsilon: f64, offset: f64) -> impl Iterator<Item = f64> {
    let nf = n as f64;
    (1..=n).map(move |i| (2.0 * PI * (1.0 + epsilon) / (i as f64 / nf + offset)).sin())
}

/// `theta_i = sin(2 pi (1 + epsilon) / (i/n + offset))`.
pub fn gen_doppler(n: usize, epsilon: f64, offset: f64) -> Result<GroundTruth> {
    if n == 0 {
        return Err(Error::invalid("horizon must be >= 1"));
    }
    if !(offset > 0.0) || !offset.is_finite() {
        return Err(Error::invalid(format!("doppler offset must be > 0, got {offset}")));
    }
    if !epsilon.is_finite() {
        return Err(Error::invalid("doppler epsilon must be finite"));
    }
    GroundTruth::new(
        doppler_values(n, epsilon, offset).collect(),
        Generator::Doppler { epsilon, offset },
    )
}

fn even_breakpoints(n: usize, levels: usize) -> Result<Vec<usize>> {
    if levels == 0 {
        return Err(Error::invalid("step trend needs at least one level"));
    }
    if n < levels {
        return Err(Error::invalid(format!("cannot fit {levels} levels into {n} points")));
    }
    Ok((1..levels).map(|j| j * n / levels + 1).collect())
}

/// Piecewise-constant trend; `levels[j]` starts at `breakpoints[j - 1]`.
pub fn gen_step(n: usize, levels: &[f64], breakpoints: &[usize]) -> Result<GroundTruth> {
    if n == 0 {
        return Err(Error::invalid("horizon must be >= 1"));
    }
    if levels.is_empty() {
        return Err(Error::invalid("step trend needs at least one level"));
    }
    if breakpoints.len() + 1 != levels.len() {
        return Err(Error::invalid(format!(
            "{} levels need {} breakpoints, got {}",
            levels.len(),
            levels.len() - 1,
            breakpoints.len()
        )));
    }
    let mut prev = 1;
    for &b in breakpoints {
        if b <= prev || b > n {
            return Err(Error::invalid(format!(
                "breakpoints must be strictly increasing within [2, {n}], got {breakpoints:?}"
            )));
        }
        prev = b;
    }
    let mut theta = Vec::with_capacity(n);
    let mut level = 0;
    for i in 1..=n {
        while level < breakpoints.len() && i >= breakpoints[level] {
            level += 1;
        }
        theta.push(levels[level]);
    }
    GroundTruth::new(
        theta,
        Generator::Step {
            levels: levels.to_vec(),
            breakpoints: Some(breakpoints.to_vec()),
        },
    )
}

/// `theta_i = slope_total (i - 1) / (n - 1)`.
pub fn gen_linear(n: usize, slope_total: f64) -> Result<GroundTruth> {
    if n < 2 {
        return Err(Error::invalid("linear trend needs n >= 2"));
    }
    if !slope_total.is_finite() {
        return Err(Error::invalid("slope must be finite"));
    }
    let denom = (n - 1) as f64;
    GroundTruth::new(
        (0..n).map(|i| slope_total * i as f64 / denom).collect(),
        Generator::Linear { slope_total },
    )
}

pub fn gen_constant(n: usize, value: f64) -> Result<GroundTruth> {
    if n == 0 {
        return Err(Error::invalid("horizon must be >= 1"));
    }
    GroundTruth::new(vec![value; n], Generator::Constant { value })
}

/// Natural cubic spline through `(x, y)` with strictly increasing `x`.
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalCubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let m = x.len();
        if m < 2 || y.len() != m {
            return Err(Error::invalid("spline needs at least two matching control points"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("spline knots must be strictly increasing"));
        }
        // Thomas algorithm on the interior second-derivative system.
        let mut second = vec![0.0; m];
        if m > 2 {
            let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
            let k = m - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h[i + 1] - (y[i + 1] - y[i]) / h[i]);
            }
            for i in 1..k {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            second[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                second[i + 1] = (rhs[i] - h[i + 1] * second[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, second })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let last = self.x.len() - 2;
        let seg = self.x[1..=last].partition_point(|&knot| knot <= t).min(last);
        let (x0, x1) = (self.x[seg], self.x[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.y[seg]
            + b * self.y[seg + 1]
            + ((a * a * a - a) * self.second[seg] + (b * b * b - b) * self.second[seg + 1]) * h * h / 6.0
    }
}

impl SplineKnots {
    pub fn spline(&self) -> Result<NaturalCubicSpline> {
        if self.count < 2 || !(self.ratio > 0.0) || !self.ratio.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::invalid(format!("degenerate spline parameters {self:?}")));
        }
        let gaps: Vec<f64> = (0..self.count - 1).map(|i| self.ratio.powi(i as i32)).collect();
        let total: f64 = gaps.iter().sum();
        let mut x = Vec::with_capacity(self.count);
        let mut acc = 0.0;
        x.push(0.0);
        for g in &gaps[..gaps.len() - 1] {
            acc += g / total;
            x.push(acc);
        }
        x.push(1.0);
        let y = (0..self.count)
            .map(|i| if i % 2 == 0 { self.amplitude } else { -self.amplitude })
            .collect();
        NaturalCubicSpline::new(x, y)
    }
}

/// First `n/2` points from the knot spline sampled at `i / (n/2)`; the rest a
/// Doppler with offset 0.38 over the second half's own horizon.
pub fn gen_hybrid(n: usize, knots: SplineKnots, epsilon: f64) -> Result<GroundTruth> {
    if n < 4 {
        return Err(Error::invalid("hybrid trend needs n >= 4"));
    }
    if !epsilon.is_finite() {
        return Err(Error::invalid("doppler epsilon must be finite"));
    }
    let spline = knots.spline()?;
    let first = n / 2;
    let second = n - first;
    let mut theta = Vec::with_capacity(n);
    theta.extend((1..=first).map(|i| spline.eval(i as f64 / first as f64)));
    theta.extend(doppler_values(second, epsilon, DOPPLER_OFFSET));
    GroundTruth::new(theta, Generator::Hybrid { knots, epsilon })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
    #[serde(default)]
    pub kind: NoiseKind,
}

impl NoiseSpec {
    pub fn gaussian(sigma: f64, seed: u64) -> Self {
        Self {
            sigma,
            seed,
            kind: NoiseKind::Gaussian,
        }
    }

    /// `len` standard draws scaled by `sigma`.
    pub fn sample(&self, len: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        match self.kind {
            NoiseKind::Gaussian => (0..len)
                .map(|_| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    self.sigma * g
                })
                .collect(),
        }
    }
}

/// `y_i = theta_i + sigma g_i`, deterministic in the seed.
pub fn add_noise(truth: &GroundTruth, spec: &NoiseSpec) -> Vec<f64> {
    if spec.sigma == 0.0 {
        return truth.theta.clone();
    }
    truth
        .theta
        .iter()
        .zip(spec.sample(truth.len()))
        .map(|(t, z)| t + z)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_norms(theta: &[f64]) -> (f64, f64) {
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for i in 1..theta.len() {
            l1 += (theta[i] - theta[i - 1]).abs();
            l2 += (theta[i] - theta[i - 1]).powi(2);
        }
        (l1, l2.sqrt())
    }

    fn check_norms(g: &GroundTruth) {
        let (l1, l2) = brute_norms(&g.theta);
        assert!((g.tv - l1).abs() < 1e-9, "{} vs {l1}", g.tv);
        assert!((g.sobolev - l2).abs() < 1e-9);
        assert!(g.sobolev <= g.tv + 1e-12);
        assert!(g.tv <= ((g.len() - 1) as f64).sqrt() * g.sobolev + 1e-9);
    }

    #[test]
    fn doppler_examples() {
        let g = gen_doppler(1, 0.0, 0.38).unwrap();
        assert!((g.theta[0] - (2.0 * PI / 1.38).sin()).abs() < 1e-15);
        assert!((g.theta[0] + 0.98733).abs() < 1e-5);
        let g = gen_doppler(5000, 0.05, 0.38).unwrap();
        assert!(g.theta.iter().all(|v| v.abs() <= 1.0));
        check_norms(&g);
        assert!(matches!(gen_doppler(10, 0.0, 0.0), Err(Error::InvalidArgument(_))));
        assert!(gen_doppler(10, 0.0, -1.0).is_err());
    }

    #[test]
    fn step_examples() {
        let g = gen_step(10, &[2.0], &[]).unwrap();
        assert_eq!(g.tv, 0.0);
        let g = gen_step(10, &[0.0, 1.0], &[6]).unwrap();
        assert_eq!(g.tv, 1.0);
        assert_eq!(g.theta[4], 0.0);
        assert_eq!(g.theta[5], 1.0);
        let g = gen_step(9, &[0.0, 3.0, 1.0], &[4, 7]).unwrap();
        assert_eq!(g.tv, 5.0);
        check_norms(&g);
        let g = Generator::Step {
            levels: vec![0.0, 3.0, 1.0],
            breakpoints: None,
        }
        .generate(12)
        .unwrap();
        assert_eq!(g.theta, vec![0.0, 0.0, 0.0, 0.0, 3.0, 3.0, 3.0, 3.0, 1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn step_rejects_malformed_breakpoints() {
        assert!(gen_step(10, &[0.0, 1.0], &[]).is_err());
        assert!(gen_step(10, &[0.0, 1.0, 2.0], &[5, 5]).is_err());
        assert!(gen_step(10, &[0.0, 1.0], &[11]).is_err());
        assert!(gen_step(10, &[0.0, 1.0], &[1]).is_err());
        assert!(gen_step(10, &[], &[]).is_err());
    }

    #[test]
    fn linear_examples() {
        let g = gen_linear(5, 2.0).unwrap();
        assert_eq!(g.theta, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!((g.tv - 2.0).abs() < 1e-12);
        assert_eq!(gen_linear(7, 0.0).unwrap().tv, 0.0);
        assert!((gen_linear(1000, -3.5).unwrap().tv - 3.5).abs() < 1e-9);
        assert!(gen_linear(1, 1.0).is_err());
    }

    #[test]
    fn spline_interpolates_and_is_natural() {
        let s = SplineKnots::default().spline().unwrap();
        for (x, y) in s.x.iter().zip(&s.y) {
            assert!((s.eval(*x) - y).abs() < 1e-12);
        }
        assert_eq!(s.second[0], 0.0);
        assert_eq!(*s.second.last().unwrap(), 0.0);
        // C1 continuity at an interior knot via one-sided finite differences
        let k = s.x[3];
        let h = 1e-7;
        let left = (s.eval(k) - s.eval(k - h)) / h;
        let right = (s.eval(k + h) - s.eval(k)) / h;
        assert!((left - right).abs() < 1e-4);
    }

    #[test]
    fn spline_matches_reference_values() {
        // reference: scipy.interpolate.CubicSpline(bc_type="natural") on the default knots
        let s = SplineKnots::default().spline().unwrap();
        let first_gap = 0.3 / (1.0 - 0.7f64.powi(7));
        assert!((s.x[1] - first_gap).abs() < 1e-12);
        let expected = [
            (0.05, 0.28361185302719844),
            (0.3, -1.2335864604316558),
            (0.61, -0.04353915117613269),
            (0.9, -1.0959757216390287),
            (0.97, 0.8302373477323701),
            (1.0, -1.0),
        ];
        for (t, v) in expected {
            assert!((s.eval(t) - v).abs() < 1e-12, "S({t}) = {}", s.eval(t));
        }
    }

    #[test]
    fn hybrid_properties() {
        let n = 4096;
        let g = gen_hybrid(n, SplineKnots::default(), 0.05).unwrap();
        check_norms(&g);
        let half = n / 2;
        assert!(g.theta[half..].iter().all(|v| v.abs() <= 1.0));
        let (a, _) = difference_norms(&g.theta[..half]);
        let (b, _) = difference_norms(&g.theta[half..]);
        let jump = (g.theta[half] - g.theta[half - 1]).abs();
        assert!((g.tv - (a + jump + b)).abs() < 1e-9);
        assert!(gen_hybrid(3, SplineKnots::default(), 0.05).is_err());
        let bad = SplineKnots {
            count: 1,
            ..SplineKnots::default()
        };
        assert!(gen_hybrid(16, bad, 0.05).is_err());
    }

    #[test]
    fn noise_is_seeded() {
        let g = gen_constant(100, 1.0).unwrap();
        assert_eq!(add_noise(&g, &NoiseSpec::gaussian(0.0, 3)), g.theta);
        let a = add_noise(&g, &NoiseSpec::gaussian(1.0, 42));
        let b = add_noise(&g, &NoiseSpec::gaussian(1.0, 42));
        let c = add_noise(&g, &NoiseSpec::gaussian(1.0, 43));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn noise_scale() {
        let n = 100_000;
        let g = gen_constant(n, 0.0).unwrap();
        for sigma in [0.5, 2.0] {
            let y = add_noise(&g, &NoiseSpec::gaussian(sigma, 7));
            let mean = y.iter().sum::<f64>() / n as f64;
            let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((var.sqrt() / sigma - 1.0).abs() < 0.02);
        }
    }

    #[test]
    fn generator_round_trips_through_json() {
        let g = Generator::hybrid();
        let json = serde_json::to_string(&g).unwrap();
        assert!(json.contains("\"kind\":\"hybrid\""));
        assert_eq!(serde_json::from_str::<Generator>(&json).unwrap(), g);
    }
}
