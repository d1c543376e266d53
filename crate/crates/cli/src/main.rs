use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use arrows_core::harness::{
    parse_algos, parse_n, parse_n_grid, parse_seeds, run_estimate_sigma, run_sweep, run_trial,
    ExperimentConfig, Mode,
};
use clap::Parser;

/// Forecast noisy trends with ARROWS and its linear baselines, and measure dynamic regret.
#[derive(Debug, Parser)]
#[command(name = "arrows", version, allow_negative_numbers = true)]
struct Cli {
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// trial | sweep | estimate-sigma
    #[arg(long)]
    mode: Option<String>,
    /// Algorithm, or a comma-separated list for sweeps: arrows, ogd-tv, ogd-sobolev, ma-tv.
    #[arg(long)]
    algo: Option<String>,
    /// Trend generator, e.g. `hybrid`, `doppler:offset=0.01`, `step:levels=0;3;1`.
    #[arg(long = "gen")]
    generator: Option<String>,
    /// Horizon for trial and estimate-sigma (accepts `2^k`).
    #[arg(long)]
    n: Option<String>,
    /// Sweep horizons: `2^10..2^17` or a comma-separated list.
    #[arg(long)]
    n_grid: Option<String>,
    /// Noise scale known to the forecasters.
    #[arg(long)]
    sigma: Option<f64>,
    /// Noise scale of simulated feedback, if different from --sigma.
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Override the shrinkage exponent.
    #[arg(long)]
    beta: Option<f64>,
    /// Seed count (`5`), list (`1,2,3`) or range (`3..8`).
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Observation file for estimate-sigma: one value per line, or CSV with a `y` column.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write zero wallclock fields so repeated runs produce identical files.
    #[arg(long)]
    no_timing: bool,
}

fn resolve(cli: Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_json_file(path)
            .with_context(|| format!("reading config {}", path.display()))?,
        None => {
            let mode: Mode = cli
                .mode
                .as_deref()
                .context("--mode is required without --config")?
                .parse()?;
            ExperimentConfig::new(mode)
        }
    };
    if let Some(mode) = &cli.mode {
        config.mode = mode.parse()?;
    }
    if let Some(algo) = &cli.algo {
        config.algos = parse_algos(algo)?;
    }
    if let Some(generator) = &cli.generator {
        config.generator = generator.parse()?;
    }
    if let Some(n) = &cli.n {
        config.n = Some(parse_n(n)?);
    }
    if let Some(grid) = &cli.n_grid {
        config.n_grid = parse_n_grid(grid)?;
    }
    if let Some(sigma) = cli.sigma {
        config.sigma = sigma;
    }
    if let Some(noise) = cli.noise_sigma {
        config.noise_sigma = Some(noise);
    }
    if let Some(delta) = cli.delta {
        config.delta = delta;
    }
    if let Some(beta) = cli.beta {
        config.beta = Some(beta);
    }
    if let Some(seeds) = &cli.seeds {
        config.seeds = parse_seeds(seeds)?;
    }
    if let Some(dir) = cli.out_dir {
        config.out_dir = dir;
    }
    if let Some(input) = cli.input {
        config.input = Some(input);
    }
    if cli.no_timing {
        config.timing = false;
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    let config = resolve(cli)?;
    match config.mode {
        Mode::Trial => {
            let s = run_trial(&config)?;
            println!(
                "{} n={} seed={} regret={} bins={} -> {}",
                s.algo,
                s.n,
                s.seed,
                s.total_regret,
                s.num_bins,
                config.out_dir.display()
            );
        }
        Mode::Sweep => {
            let report = run_sweep(&config)?;
            for a in &report.algos {
                print!("{} slope={:.4}", a.algo, a.slope);
                if let Some(v) = a.bin_bound_violations {
                    print!(" bin_bound_violations={v}");
                }
                println!();
            }
            println!("-> {}", config.out_dir.display());
        }
        Mode::EstimateSigma => {
            let estimate = run_estimate_sigma(&config)?;
            println!("{}", estimate.sigma_hat);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
