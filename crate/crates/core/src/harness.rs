//! Experiment configuration and the trial, sweep and sigma-estimation runners
//! behind the `arrows` command line.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    ma_window_tv, ogd_batch_size_sobolev, ogd_batch_size_tv, run_ma, run_ogd, MaConfig, OgdConfig,
};
use crate::error::{Error, Result};
use crate::evaluation::{dynamic_regret, mean_and_std, scaling_slope, TrialTrace};
use crate::haar::estimate_sigma_mad;
use crate::policy::{bin_count_bound, ArrowsConfig, ArrowsForecaster, DEFAULT_DELTA};
use crate::sequences::{add_noise, gen_step, Generator, GroundTruth, NoiseSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Trial,
    Sweep,
    EstimateSigma,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trial" => Ok(Mode::Trial),
            "sweep" => Ok(Mode::Sweep),
            "estimate-sigma" => Ok(Mode::EstimateSigma),
            other => Err(Error::invalid(format!(
                "unknown mode `{other}` (expected trial, sweep or estimate-sigma)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Arrows,
    OgdTv,
    OgdSobolev,
    MaTv,
}

impl Algo {
    pub const ALL: [Algo; 4] = [Algo::Arrows, Algo::OgdTv, Algo::OgdSobolev, Algo::MaTv];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algo::Arrows => "arrows",
            Algo::OgdTv => "ogd-tv",
            Algo::OgdSobolev => "ogd-sobolev",
            Algo::MaTv => "ma-tv",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algo::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown algorithm `{s}` (expected arrows, ogd-tv, ogd-sobolev or ma-tv)"
                ))
            })
    }
}

pub fn parse_algos(s: &str) -> Result<Vec<Algo>> {
    s.split(',').map(|a| a.trim().parse()).collect()
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("`{key}` expects a number, got `{v}`")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::invalid(format!("`{key}` expects an integer, got `{v}`")))
}

/// Parses `name` or `name:key=value,key=value`; list values use `;`.
///
/// Examples: `hybrid`, `doppler:offset=0.01`, `step:levels=0;3;1,breakpoints=100;200`,
/// `linear:slope=2`, `constant:value=3`.
impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let pairs: Vec<(&str, &str)> = params
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .ok_or_else(|| Error::invalid(format!("generator parameter `{p}` is not key=value")))
            })
            .collect::<Result<_>>()?;
        let unknown = |k: &str| Error::invalid(format!("unknown parameter `{k}` for generator `{name}`"));
        let mut generator = match name.trim() {
            "doppler" => Generator::doppler(),
            "sobolev-doppler" => Generator::sobolev_doppler(),
            "hybrid" => Generator::hybrid(),
            "step" => Generator::Step {
                levels: vec![0.0, 1.0],
                breakpoints: None,
            },
            "linear" => Generator::Linear { slope_total: 1.0 },
            "constant" => Generator::Constant { value: 0.0 },
            other => return Err(Error::invalid(format!("unknown generator `{other}`"))),
        };
        for (k, v) in pairs {
            match (&mut generator, k) {
                (Generator::Doppler { epsilon, .. }, "epsilon" | "eps") => *epsilon = parse_f64(k, v)?,
                (Generator::Doppler { offset, .. }, "offset") => *offset = parse_f64(k, v)?,
                (Generator::Hybrid { epsilon, .. }, "epsilon" | "eps") => *epsilon = parse_f64(k, v)?,
                (Generator::Hybrid { knots, .. }, "knots") => knots.count = parse_usize(k, v)?,
                (Generator::Hybrid { knots, .. }, "ratio") => knots.ratio = parse_f64(k, v)?,
                (Generator::Hybrid { knots, .. }, "amplitude") => knots.amplitude = parse_f64(k, v)?,
                (Generator::Step { levels, .. }, "levels") => {
                    *levels = v.split(';').map(|x| parse_f64(k, x)).collect::<Result<_>>()?
                }
                (Generator::Step { breakpoints, .. }, "breakpoints") => {
                    *breakpoints = Some(v.split(';').map(|x| parse_usize(k, x)).collect::<Result<_>>()?)
                }
                (Generator::Linear { slope_total }, "slope" | "slope_total") => {
                    *slope_total = parse_f64(k, v)?
                }
                (Generator::Constant { value }, "value" | "c") => *value = parse_f64(k, v)?,
                _ => return Err(unknown(k)),
            }
        }
        Ok(generator)
    }
}

/// Seeds as a count (`5` means 0..5), a list (`1,4,9`) or a range (`3..8`).
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse seeds `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    if s.contains(',') {
        return s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect();
    }
    let count: u64 = s.parse().map_err(|_| bad())?;
    Ok((0..count).collect())
}

fn parse_size(s: &str) -> Result<usize> {
    let s = s.trim();
    let bad = || Error::invalid(format!("cannot parse size `{s}`"));
    match s.split_once('^') {
        Some(("2", k)) => {
            let k: u32 = k.trim().parse().map_err(|_| bad())?;
            1usize.checked_shl(k).filter(|_| k < usize::BITS).ok_or_else(bad)
        }
        Some(_) => Err(bad()),
        None => s.parse().map_err(|_| bad()),
    }
}

/// Horizon grid: a list of sizes (`1024,2^11,4096`) or a power-of-two range `2^10..2^17`.
pub fn parse_n_grid(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_size(a)?, parse_size(b)?);
        if !a.is_power_of_two() || !b.is_power_of_two() || a > b {
            return Err(Error::invalid(format!("range `{s}` must run between powers of two")));
        }
        let mut grid = Vec::new();
        let mut n = a;
        while n <= b {
            grid.push(n);
            n *= 2;
        }
        return Ok(grid);
    }
    s.split(',').map(parse_size).collect()
}

pub fn parse_n(s: &str) -> Result<usize> {
    parse_size(s)
}

fn default_algos() -> Vec<Algo> {
    vec![Algo::Arrows]
}

fn default_generator() -> Generator {
    Generator::hybrid()
}

fn default_sigma() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

/// Fully resolved experiment description, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default = "default_algos")]
    pub algos: Vec<Algo>,
    #[serde(default = "default_generator")]
    pub generator: Generator,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub n_grid: Vec<usize>,
    /// Noise scale given to the forecasters and used for tuning.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// Noise scale of the simulated feedback; defaults to `sigma`.
    #[serde(default)]
    pub noise_sigma: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub input: Option<PathBuf>,
    /// When false, wallclock fields are written as zero so outputs are byte-identical across runs.
    #[serde(default = "default_true")]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            algos: default_algos(),
            generator: default_generator(),
            n: None,
            n_grid: Vec::new(),
            sigma: default_sigma(),
            noise_sigma: None,
            delta: default_delta(),
            beta: None,
            seeds: default_seeds(),
            out_dir: default_out_dir(),
            input: None,
            timing: true,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma.unwrap_or(self.sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be finite and >= 0, got {}", self.sigma)));
        }
        let noise = self.noise_sigma();
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(Error::invalid(format!("noise sigma must be finite and >= 0, got {noise}")));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1], got {}", self.delta)));
        }
        if let Some(beta) = self.beta {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(Error::invalid(format!("beta must be finite and > 0, got {beta}")));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        match self.mode {
            Mode::Trial => {
                let n = self.n.ok_or_else(|| Error::invalid("trial mode needs --n"))?;
                if self.algos.len() != 1 {
                    return Err(Error::invalid("trial mode runs exactly one algorithm"));
                }
                check_generator_at(&self.generator, n)?;
            }
            Mode::Sweep => {
                if self.n_grid.len() < 3 {
                    return Err(Error::invalid("sweep mode needs an n-grid with at least 3 sizes"));
                }
                if self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::invalid("n-grid must be strictly increasing"));
                }
                if self.algos.is_empty() {
                    return Err(Error::invalid("sweep mode needs at least one algorithm"));
                }
                let mut sorted = self.algos.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != self.algos.len() {
                    return Err(Error::invalid("duplicate algorithms in sweep"));
                }
                for &n in &self.n_grid {
                    check_generator_at(&self.generator, n)?;
                }
            }
            Mode::EstimateSigma => {
                if self.input.is_none() {
                    let n = self
                        .n
                        .ok_or_else(|| Error::invalid("estimate-sigma needs --input or --n with a generator"))?;
                    if n < 2 {
                        return Err(Error::invalid("estimate-sigma needs at least 2 observations"));
                    }
                    check_generator_at(&self.generator, n)?;
                }
            }
        }
        Ok(())
    }

    fn arrows_config(&self, n: usize) -> Result<ArrowsConfig> {
        let config = ArrowsConfig::new(n, self.sigma)?.with_delta(self.delta)?;
        match self.beta {
            Some(beta) => config.with_beta(beta),
            None => Ok(config),
        }
    }
}

fn check_generator_at(generator: &Generator, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("horizon must be >= 1"));
    }
    match generator {
        Generator::Linear { .. } if n < 2 => Err(Error::invalid("linear trend needs n >= 2")),
        Generator::Hybrid { knots, .. } => {
            if n < 4 {
                return Err(Error::invalid("hybrid trend needs n >= 4"));
            }
            knots.spline().map(|_| ())
        }
        Generator::Doppler { offset, .. } if !(*offset > 0.0) => {
            Err(Error::invalid(format!("doppler offset must be > 0, got {offset}")))
        }
        Generator::Step { levels, breakpoints } => {
            if levels.is_empty() || n < levels.len() {
                return Err(Error::invalid(format!("cannot fit {} levels into {n} points", levels.len())));
            }
            if let Some(b) = breakpoints {
                gen_step(n, levels, b).map(|_| ())?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Tuned size for a linear baseline; a zero-variation trend gets the whole horizon.
fn tuned(n: usize, radius: f64, f: impl Fn(f64) -> Result<usize>) -> Result<usize> {
    if radius > 0.0 {
        f(radius)
    } else {
        Ok(n)
    }
}

/// Algorithm parameters resolved against a specific trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "algo", rename_all = "kebab-case")]
pub enum ResolvedAlgo {
    Arrows {
        #[serde(flatten)]
        config: ArrowsConfig,
        beta: f64,
        lambda: f64,
    },
    OgdTv { batch_size: usize },
    OgdSobolev { batch_size: usize },
    MaTv { window: usize },
}

impl ResolvedAlgo {
    pub fn resolve(algo: Algo, config: &ExperimentConfig, truth: &GroundTruth) -> Result<Self> {
        let n = truth.len();
        let sigma = config.sigma;
        Ok(match algo {
            Algo::Arrows => {
                let arrows = config.arrows_config(n)?;
                ResolvedAlgo::Arrows {
                    beta: arrows.effective_beta(),
                    lambda: arrows.lambda(),
                    config: arrows,
                }
            }
            Algo::OgdTv => ResolvedAlgo::OgdTv {
                batch_size: tuned(n, truth.tv, |c| ogd_batch_size_tv(n, sigma, c))?,
            },
            Algo::OgdSobolev => ResolvedAlgo::OgdSobolev {
                batch_size: tuned(n, truth.sobolev, |c| ogd_batch_size_sobolev(n, sigma, c))?,
            },
            Algo::MaTv => ResolvedAlgo::MaTv {
                window: tuned(n, truth.tv, |c| ma_window_tv(n, sigma, c))?,
            },
        })
    }

    pub fn algo(&self) -> Algo {
        match self {
            ResolvedAlgo::Arrows { .. } => Algo::Arrows,
            ResolvedAlgo::OgdTv { .. } => Algo::OgdTv,
            ResolvedAlgo::OgdSobolev { .. } => Algo::OgdSobolev,
            ResolvedAlgo::MaTv { .. } => Algo::MaTv,
        }
    }

    pub fn run(&self, ys: &[f64]) -> Result<crate::forecast::ForecastRun> {
        let n = ys.len();
        match *self {
            ResolvedAlgo::Arrows { config, .. } => ArrowsForecaster::new(config)?.run_horizon(ys),
            ResolvedAlgo::OgdTv { batch_size } | ResolvedAlgo::OgdSobolev { batch_size } => {
                run_ogd(OgdConfig::new(batch_size, n)?, ys)
            }
            ResolvedAlgo::MaTv { window } => run_ma(MaConfig::new(window, n)?, ys),
        }
    }
}

/// One forecaster run on one noisy realization.
pub fn simulate(
    algo: Algo,
    config: &ExperimentConfig,
    truth: &GroundTruth,
    seed: u64,
) -> Result<(ResolvedAlgo, TrialTrace)> {
    let resolved = ResolvedAlgo::resolve(algo, config, truth)?;
    let ys = add_noise(truth, &NoiseSpec::gaussian(config.noise_sigma(), seed));
    let start = Instant::now();
    let run = resolved.run(&ys)?;
    let elapsed = if config.timing { start.elapsed() } else { Duration::ZERO };
    let params = serde_json::to_value(resolved)?;
    let trace = TrialTrace::assemble(algo.as_str(), seed, params, &truth.theta, &ys, &run, elapsed)?;
    Ok((resolved, trace))
}

/// Formats a real with 17 significant digits in scientific notation.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct TruthSummary {
    pub generator: Generator,
    pub tv: f64,
    pub sobolev: f64,
    pub sup: f64,
}

impl From<&GroundTruth> for TruthSummary {
    fn from(g: &GroundTruth) -> Self {
        Self {
            generator: g.label.clone(),
            tv: g.tv,
            sobolev: g.sobolev,
            sup: g.sup,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialSummary {
    pub algo: Algo,
    pub n: usize,
    pub seed: u64,
    pub total_regret: f64,
    pub num_bins: usize,
    /// Shrinkage exponent and threshold; null for the linear baselines.
    pub beta: Option<f64>,
    pub lambda: Option<f64>,
    pub params: ResolvedAlgo,
    pub truth: TruthSummary,
    pub wallclock_ms: f64,
    pub config: ExperimentConfig,
}

pub fn write_trace_csv(path: &Path, trace: &TrialTrace) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,theta,y,x,loss,restart")?;
    for r in &trace.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.t,
            fmt_real(r.theta),
            fmt_real(r.y),
            fmt_real(r.x),
            fmt_real(r.loss),
            u8::from(r.restart)
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Runs one trial with the first configured seed; writes `trace.csv` and `summary.json`.
pub fn run_trial(config: &ExperimentConfig) -> Result<TrialSummary> {
    if config.mode != Mode::Trial {
        return Err(Error::invalid("run_trial needs mode = trial"));
    }
    config.validate()?;
    let n = config.n.expect("validated");
    let algo = config.algos[0];
    let seed = config.seeds[0];
    let truth = config.generator.generate(n)?;
    let (resolved, trace) = simulate(algo, config, &truth, seed)?;
    let (beta, lambda) = match resolved {
        ResolvedAlgo::Arrows { beta, lambda, .. } => (Some(beta), Some(lambda)),
        _ => (None, None),
    };
    let summary = TrialSummary {
        algo,
        n,
        seed,
        total_regret: dynamic_regret(&trace),
        num_bins: trace.num_bins,
        beta,
        lambda,
        params: resolved,
        truth: TruthSummary::from(&truth),
        wallclock_ms: trace.wallclock.as_secs_f64() * 1e3,
        config: config.clone(),
    };
    prepare_out_dir(&config.out_dir)?;
    write_trace_csv(&config.out_dir.join("trace.csv"), &trace)?;
    write_json(&config.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// One `(algo, n, seed)` cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub algo: Algo,
    pub n: usize,
    pub seed: u64,
    pub regret: f64,
    pub bins: usize,
    pub wallclock_ms: f64,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub mean_bins: f64,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoScaling {
    pub algo: Algo,
    pub slope: f64,
    pub per_n: Vec<ScalingRow>,
    /// ARROWS runs whose bin count exceeded `max(1, 2 n^(1/3) C^(2/3) sigma^(-2/3) ln n)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin_bound_violations: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub algos: Vec<AlgoScaling>,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn scaling(&self, algo: Algo) -> Option<&AlgoScaling> {
        self.algos.iter().find(|a| a.algo == algo)
    }
}

/// Runs every `(algo, n, seed)` cell in parallel and merges results in
/// `(algo, n, seed)` order.
pub fn sweep_rows(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let truths: Vec<GroundTruth> = config
        .n_grid
        .iter()
        .map(|&n| config.generator.generate(n))
        .collect::<Result<_>>()?;
    let mut tasks = Vec::new();
    for &algo in &config.algos {
        for (i, &n) in config.n_grid.iter().enumerate() {
            for &seed in &config.seeds {
                tasks.push((algo, i, n, seed));
            }
        }
    }
    tasks
        .into_par_iter()
        .map(|(algo, i, n, seed)| {
            let truth = &truths[i];
            let (_, trace) = simulate(algo, config, truth, seed)?;
            Ok(SweepRow {
                algo,
                n,
                seed,
                regret: dynamic_regret(&trace),
                bins: trace.num_bins,
                wallclock_ms: trace.wallclock.as_secs_f64() * 1e3,
                tv: truth.tv,
            })
        })
        .collect()
}

pub fn summarize_sweep(config: &ExperimentConfig, rows: Vec<SweepRow>) -> Result<SweepReport> {
    let mut algos = Vec::new();
    for &algo in &config.algos {
        let mut per_n = Vec::new();
        let mut violations = 0;
        for &n in &config.n_grid {
            let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.algo == algo && r.n == n).collect();
            let regrets: Vec<f64> = cell.iter().map(|r| r.regret).collect();
            let (mean_regret, std_regret) = mean_and_std(&regrets);
            let mean_bins = cell.iter().map(|r| r.bins as f64).sum::<f64>() / cell.len() as f64;
            violations += cell
                .iter()
                .filter(|r| r.bins as f64 > bin_count_bound(r.n, r.tv, config.sigma))
                .count();
            per_n.push(ScalingRow {
                n,
                mean_regret,
                std_regret,
                mean_bins,
                tv: cell.first().map_or(f64::NAN, |r| r.tv),
            });
        }
        let points: Vec<(usize, f64)> = per_n.iter().map(|r| (r.n, r.mean_regret)).collect();
        algos.push(AlgoScaling {
            algo,
            slope: scaling_slope(&points)?,
            per_n,
            bin_bound_violations: (algo == Algo::Arrows).then_some(violations),
        });
    }
    Ok(SweepReport {
        algos,
        config: config.clone(),
        rows,
    })
}

pub fn write_scaling_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "algo,n,seed,regret,bins,wallclock_ms")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.algo,
            r.n,
            r.seed,
            fmt_real(r.regret),
            r.bins,
            fmt_real(r.wallclock_ms)
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Runs a sweep; writes `scaling.csv` and `report.json`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    if config.mode != Mode::Sweep {
        return Err(Error::invalid("run_sweep needs mode = sweep"));
    }
    config.validate()?;
    let report = summarize_sweep(config, sweep_rows(config)?)?;
    prepare_out_dir(&config.out_dir)?;
    write_scaling_csv(&config.out_dir.join("scaling.csv"), &report.rows)?;
    write_json(&config.out_dir.join("report.json"), &report)?;
    Ok(report)
}

/// Reads observations from a text file: one number per line, or a CSV whose
/// header names a `y` column.
pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let Some(first) = lines.next() else {
        return Ok(Vec::new());
    };
    let parse = |line: &str, col: usize| -> Result<f64> {
        let field = line
            .split(',')
            .nth(col)
            .ok_or_else(|| Error::invalid(format!("line `{line}` has no column {col}")))?;
        parse_f64("value", field)
    };
    let header_col = first.split(',').position(|h| h.trim() == "y");
    match header_col {
        Some(col) => lines.map(|l| parse(l, col)).collect(),
        None => std::iter::once(first).chain(lines).map(|l| parse(l, 0)).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaEstimate {
    pub sigma_hat: f64,
    pub len: usize,
    pub source: String,
    pub config: ExperimentConfig,
}

/// Estimates the noise scale of `--input`, or of a simulated series; writes `sigma.json`.
pub fn run_estimate_sigma(config: &ExperimentConfig) -> Result<SigmaEstimate> {
    if config.mode != Mode::EstimateSigma {
        return Err(Error::invalid("run_estimate_sigma needs mode = estimate-sigma"));
    }
    config.validate()?;
    let (ys, source) = match &config.input {
        Some(path) => (read_series(path)?, path.display().to_string()),
        None => {
            let n = config.n.expect("validated");
            let truth = config.generator.generate(n)?;
            let seed = config.seeds[0];
            let ys = add_noise(&truth, &NoiseSpec::gaussian(config.noise_sigma(), seed));
            (ys, format!("{}:n={n}:seed={seed}", config.generator.name()))
        }
    };
    let estimate = SigmaEstimate {
        sigma_hat: estimate_sigma_mad(&ys)?,
        len: ys.len(),
        source,
        config: config.clone(),
    };
    prepare_out_dir(&config.out_dir)?;
    write_json(&config.out_dir.join("sigma.json"), &estimate)?;
    Ok(estimate)
}
