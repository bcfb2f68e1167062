//! Batch experiments over the Bruns suite and the 3x3 games.
//!
//! Every experiment is driven by an [`ExperimentConfig`]. Jobs are pure
//! functions of their child seed, run on a rayon pool and merged in job
//! order, so outputs depend only on the configuration.

mod counter;
mod fig5b;
mod fig6;
mod fig7;
mod output;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorConfig;
use crate::game::SimplexPoint;
use crate::regret::Partition;
use crate::{Error, Result};

pub use counter::{run_counterexamples, CounterexampleResult, SymmetricRpsResult};
pub use fig5b::{run_fig5b_fields, CirculationCheck, Fig5bResult};
pub use fig6::{run_fig6, Fig6Result, GameSummary, RunRecord};
pub use fig7::{run_fig7, Fig7GameResult, Fig7Result};
pub use output::version_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Fig5bFields,
    Fig6Mosaic,
    Fig7Conditional,
    CceCounterexample,
    SymmetricRps,
}

impl ExperimentKind {
    /// Name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            ExperimentKind::Fig5bFields => "fig5b",
            ExperimentKind::Fig6Mosaic => "fig6",
            ExperimentKind::Fig7Conditional => "fig7",
            ExperimentKind::CceCounterexample | ExperimentKind::SymmetricRps => "counterexamples",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig5bOptions {
    /// Grid points per axis.
    pub grid: usize,
    /// Half-side of the square used for the circulation test.
    pub loop_half_side: f64,
}

impl Default for Fig5bOptions {
    fn default() -> Self {
        Fig5bOptions { grid: 21, loop_half_side: 0.02 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig6Options {
    /// Checkpoints on the regret series (evenly spaced in time).
    pub checkpoints: usize,
    /// Largest tolerated fraction of aborted runs.
    pub max_abort_fraction: f64,
}

impl Default for Fig6Options {
    fn default() -> Self {
        Fig6Options { checkpoints: 100, max_abort_fraction: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig7Options {
    /// Band half-width as a fraction of the reference divergence.
    pub eps_factor: f64,
    /// Reference point taken at this fraction of the horizon (trial 0).
    pub reference_fraction: f64,
    /// Attempts with doubled eps when the band is never visited.
    pub max_attempts: usize,
    /// Keep every `scatter_thin`-th sample in the raw scatter file.
    pub scatter_thin: usize,
}

impl Default for Fig7Options {
    fn default() -> Self {
        Fig7Options {
            eps_factor: 0.02,
            reference_fraction: 0.1,
            max_attempts: 3,
            scatter_thin: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleOptions {
    pub epochs: usize,
    pub epoch_len: f64,
    /// Common start of both players in rock-paper-scissors.
    pub rps_start: Vec<f64>,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        CounterexampleOptions {
            epochs: 200,
            epoch_len: 1.0,
            rps_start: vec![0.5, 0.3, 0.2],
        }
    }
}

/// Full description of one batch run. Every output file echoes it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default = "default_partition")]
    pub partition: Partition,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub fig5b: Fig5bOptions,
    #[serde(default)]
    pub fig6: Fig6Options,
    #[serde(default)]
    pub fig7: Fig7Options,
    #[serde(default)]
    pub counterexample: CounterexampleOptions,
}

fn default_trials() -> usize {
    10
}

fn default_partition() -> Partition {
    Partition::intervals(10)
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("runs")
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            trials: default_trials(),
            seed: 0,
            integrator: IntegratorConfig::default(),
            partition: default_partition(),
            out_dir: default_out_dir(),
            fig5b: Fig5bOptions::default(),
            fig6: Fig6Options::default(),
            fig7: Fig7Options::default(),
            counterexample: CounterexampleOptions::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        self.integrator.validate()?;
        self.partition.validate()?;
        if self.fig5b.grid < 2 || !(self.fig5b.loop_half_side > 0.0) {
            return Err(Error::Input("fig5b needs grid >= 2 and a positive loop".into()));
        }
        if self.fig6.checkpoints == 0 || !(0.0..=1.0).contains(&self.fig6.max_abort_fraction) {
            return Err(Error::Input("fig6 needs checkpoints >= 1 and an abort fraction in [0, 1]".into()));
        }
        let f7 = &self.fig7;
        if !(f7.eps_factor > 0.0 && f7.reference_fraction > 0.0 && f7.reference_fraction < 1.0)
            || f7.max_attempts == 0
            || f7.scatter_thin == 0
        {
            return Err(Error::Input("invalid fig7 options".into()));
        }
        let ce = &self.counterexample;
        if ce.epochs == 0 || !(ce.epoch_len > 0.0) {
            return Err(Error::Input("counterexample needs epochs >= 1 and epoch_len > 0".into()));
        }
        Ok(())
    }
}

/// Independent generator for job `(game, trial)` under `seed`.
pub fn child_rng(seed: u64, game: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((game as u64) << 32) | trial as u64);
    rng
}

/// Flat Dirichlet sample with every coordinate moved into `[lo, 1 - lo]`.
pub fn random_interior(rng: &mut ChaCha8Rng, n: usize, lo: f64) -> SimplexPoint {
    assert!(n >= 2 && lo * n as f64 <= 1.0);
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / total).collect();
    // clamping the small coordinates and renormalizing only shrinks the
    // others, so a few passes settle
    for _ in 0..64 {
        let deficit: f64 = p.iter().map(|&v| (lo - v).max(0.0)).sum();
        if deficit == 0.0 {
            break;
        }
        let free: f64 = p.iter().filter(|&&v| v > lo).map(|v| v - lo).sum();
        for v in &mut p {
            *v = if *v <= lo { lo } else { *v - deficit * (*v - lo) / free };
        }
    }
    SimplexPoint::normalized(p).expect("positive weights")
}

/// Worker count: `PHIREG_THREADS` when set, else the machine's parallelism.
pub fn worker_count() -> usize {
    std::env::var("PHIREG_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
}

/// Run `f` on every job in a dedicated pool; results come back in job order.
pub(crate) fn par_map<T, R, F>(jobs: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Input(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(&f).collect()))
}

/// Run whichever experiment `cfg` names, writing into `cfg.out_dir`.
pub fn run(cfg: &ExperimentConfig) -> Result<String> {
    cfg.validate()?;
    let summary = match cfg.experiment {
        ExperimentKind::Fig5bFields => run_fig5b_fields(cfg)?.summary(),
        ExperimentKind::Fig6Mosaic => run_fig6(cfg)?.summary(),
        ExperimentKind::Fig7Conditional => run_fig7(cfg)?.summary(),
        ExperimentKind::CceCounterexample | ExperimentKind::SymmetricRps => run_counterexamples(cfg)?.summary(),
    };
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_unknown_keys() {
        let cfg = ExperimentConfig::from_json(r#"{"experiment":"fig6_mosaic","seed":7}"#).unwrap();
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.partition, Partition::intervals(10));
        assert_eq!(cfg.integrator, IntegratorConfig::default());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"fig6_mosaic","sead":7}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"fig6_mosaic","trials":0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment":"fig6_mosaic","fig7":{"eps":1}}"#).is_err());
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn child_streams_are_reproducible_and_distinct() {
        use rand::Rng;
        let a: u64 = child_rng(7, 3, 1).random();
        let b: u64 = child_rng(7, 3, 1).random();
        let c: u64 = child_rng(7, 3, 2).random();
        let d: u64 = child_rng(7, 4, 1).random();
        assert_eq!(a, b);
        assert!(a != c && a != d && c != d);
    }

    #[test]
    fn random_starts_respect_the_floor() {
        let mut rng = child_rng(1, 0, 0);
        for n in [2, 3, 4] {
            for _ in 0..2000 {
                let p = random_interior(&mut rng, n, 0.01);
                let s: f64 = p.as_slice().iter().sum();
                assert!((s - 1.0).abs() < 1e-12);
                assert!(p.as_slice().iter().all(|&v| v >= 0.01 - 1e-15 && v <= 0.99 + 1e-15), "{p:?}");
            }
        }
    }
}
