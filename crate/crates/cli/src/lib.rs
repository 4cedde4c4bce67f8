//! Config-driven experiments on top of the `ergowalk` crate.
//!
//! Each scenario reproduces one quantitative claim as a set of tables plus
//! acceptance checks. [`parse_config`] validates a JSON config,
//! [`run_experiment`] evaluates it, and [`Report::write`] stores the tables
//! as CSV next to a `summary.json`.

pub mod config;
pub mod fit;
pub mod report;
mod scenarios;

pub use config::{parse_config, parse_value, ConfigError, ExperimentConfig, Issue, Scenario, Subcommand};
pub use fit::{fit_rate, FitError, RateFit};
pub use report::{Cell, Check, Report, Table};

/// Overrides the default output directory (`results`).
pub const OUT_DIR_ENV: &str = "ERGOWALK_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum StepError {
    #[error(transparent)]
    Module(#[from] ergowalk::Error),
    #[error(transparent)]
    Fit(#[from] FitError),
}

#[derive(Debug, thiserror::Error)]
#[error("scenario {scenario}: {source}")]
pub struct RunError {
    pub scenario: &'static str,
    #[source]
    pub source: StepError,
}

/// Runs a validated config. The result depends only on the config: parallel
/// sections collect in input order and reduce sequentially.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, RunError> {
    let scenario = config.scenario.name();
    let mut report = Report::new(config.subcommand, scenario);
    let outcome = match &config.scenario {
        Scenario::SlowMode(s) => scenarios::lattice::slow_mode(s, &mut report),
        Scenario::FourierBound(s) => scenarios::lattice::bound(s, &mut report),
        Scenario::FixedTime(s) => scenarios::lattice::fixed_time(s, &mut report),
        Scenario::Oscillation(s) => scenarios::lattice::oscillation(s, &mut report),
        Scenario::CrystalWeights(s) => scenarios::crystal::weights(s, config.tolerance, &mut report),
        Scenario::CellUniform(s) => scenarios::crystal::cell_uniform(s, config.tolerance, &mut report),
        Scenario::FlatBand(s) => scenarios::crystal::flat_band(s, config.tolerance, &mut report),
        Scenario::TorusRate(s) => scenarios::torus::rate(s, &mut report),
        Scenario::Revival(s) => scenarios::torus::revival(s, &mut report),
        Scenario::BoxStates(s) => scenarios::torus::boxes(s, &mut report),
        Scenario::SphereGap(s) => scenarios::sphere::gap(s, &mut report),
    };
    outcome.map_err(|source| RunError { scenario, source })?;
    Ok(report)
}

/// `--out`, then the config's `out`, then `$ERGOWALK_OUT_DIR/<scenario>`,
/// then `results/<scenario>`.
pub fn output_dir(cli: Option<&std::path::Path>, config: &ExperimentConfig) -> std::path::PathBuf {
    if let Some(dir) = cli.map(std::path::Path::to_path_buf).or_else(|| config.out.clone()) {
        return dir;
    }
    let base = std::env::var_os(OUT_DIR_ENV).map(std::path::PathBuf::from).unwrap_or_else(|| "results".into());
    base.join(config.scenario.name())
}
