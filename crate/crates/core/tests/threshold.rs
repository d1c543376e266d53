//! How the restart threshold shapes regret growth on the hybrid trend.
//!
//! These checks are observations about the default shrinkage exponent, not
//! acceptance criteria.

use arrows_core::harness::{summarize_sweep, sweep_rows, Algo, ExperimentConfig, Mode};

fn arrows_slope(beta: Option<f64>) -> (f64, f64) {
    let mut config = ExperimentConfig::new(Mode::Sweep);
    config.algos = vec![Algo::Arrows, Algo::OgdTv];
    config.n_grid = (12..=17).map(|k| 1usize << k).collect();
    config.seeds = (0..5).collect();
    config.beta = beta;
    config.timing = false;
    let report = summarize_sweep(&config, sweep_rows(&config).unwrap()).unwrap();
    let slope = |a| report.scaling(a).unwrap().slope;
    (slope(Algo::Arrows), slope(Algo::OgdTv))
}

#[test]
fn smaller_threshold_lowers_regret_growth() {
    let (default_beta, ogd) = arrows_slope(None);
    let (universal, _) = arrows_slope(Some(2.0));
    println!("hybrid slopes: arrows default beta {default_beta:.3}, beta = 2 {universal:.3}, ogd-tv {ogd:.3}");
    assert!(universal < default_beta - 0.05);
    assert!(universal < ogd - 0.1);
    assert!((0.25..=0.45).contains(&universal));
}
