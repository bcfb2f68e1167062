use std::io::Write;

use serde::Serialize;

use super::output::create;
use super::{child_rng, par_map, random_interior, ExperimentConfig};
use crate::bruns::{enumerate_144, BrunsGameId};
use crate::dynamics::integrate;
use crate::game::{classify_case, CaseClass, Game, Player, SimplexPoint};
use crate::regret::{accumulate_series, internal_regret};
use crate::stats::{median, sample_variance, AggregateStats};
use crate::{Error, Result};

/// One (game, trial) run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub game: String,
    pub trial: usize,
    pub x0: SimplexPoint,
    pub y0: SimplexPoint,
    /// Checkpoint times.
    pub times: Vec<f64>,
    /// Normalized `MR^t / t` at each checkpoint.
    pub mosaic_time_avg: Vec<f64>,
    /// Raw-scale regrets at the horizon.
    pub external: f64,
    pub internal: f64,
    pub swap: f64,
    pub mosaic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSummary {
    pub game: String,
    pub case: CaseClass,
    pub aggregate: AggregateStats,
    /// Sample variance across trials of the final normalized value.
    pub final_variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig6Result {
    pub runs: Vec<RunRecord>,
    pub pooled: AggregateStats,
    pub per_game: Vec<GameSummary>,
    pub aborted: Vec<(String, usize, String)>,
}

impl Fig6Result {
    pub fn game(&self, id: &str) -> Option<&GameSummary> {
        self.per_game.iter().find(|g| g.game == id)
    }

    pub fn median_variance(&self) -> f64 {
        let v: Vec<f64> = self.per_game.iter().map(|g| g.final_variance).collect();
        median(&v)
    }

    /// Pooled mean at the checkpoint closest to `t`.
    pub fn pooled_at(&self, t: f64) -> f64 {
        let times = &self.pooled.times;
        let k = (0..times.len())
            .min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs()))
            .expect("non-empty series");
        self.pooled.mean[k]
    }

    pub fn summary(&self) -> String {
        let ba_as = self.game("BaxAs").map_or(f64::NAN, |g| g.final_variance);
        format!(
            "fig6: {} runs ({} aborted), pooled final time-average mosaic regret {:.6} (+- {:.6}), \
             BaxAs variance {:.3e}, median variance {:.3e}",
            self.runs.len(),
            self.aborted.len(),
            self.pooled.final_mean(),
            self.pooled.half_width.last().copied().unwrap_or(f64::NAN),
            ba_as,
            self.median_variance()
        )
    }
}

/// Row payoff range, used to map utilities onto `[0, 1]`.
fn payoff_range(g: &Game) -> f64 {
    let a = g.row_payoff();
    let flat = a.iter().flatten();
    let hi = flat.clone().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let lo = flat.fold(f64::INFINITY, |m, &v| m.min(v));
    hi - lo
}

fn run_one(cfg: &ExperimentConfig, index: usize, id: BrunsGameId, g: &Game, trial: usize) -> Result<RunRecord> {
    let mut rng = child_rng(cfg.seed, index, trial);
    let x0 = random_interior(&mut rng, 2, 0.01);
    let y0 = random_interior(&mut rng, 2, 0.01);
    let traj = integrate(g, &x0, &y0, &cfg.integrator)?;
    let every = ((traj.len() - 1) / cfg.fig6.checkpoints).max(1);
    let (acc, points) = accumulate_series(&traj, &cfg.partition, Player::Row, every)?;
    let scale = payoff_range(g);
    let last = points.last().expect("checkpoints requested");
    Ok(RunRecord {
        game: id.to_string(),
        trial,
        x0,
        y0,
        times: points.iter().map(|p| p.t).collect(),
        mosaic_time_avg: points.iter().map(|p| p.mosaic / p.t / scale).collect(),
        external: last.external,
        internal: internal_regret(&acc),
        swap: last.swap,
        mosaic: last.mosaic,
    })
}

/// Mosaic regret of every Bruns game over `cfg.trials` random starts.
pub fn run_fig6(cfg: &ExperimentConfig) -> Result<Fig6Result> {
    cfg.validate()?;
    let games = enumerate_144();
    let jobs: Vec<(usize, usize)> = (0..games.len()).flat_map(|g| (0..cfg.trials).map(move |t| (g, t))).collect();
    let outcomes = par_map(&jobs, |&(gi, trial)| {
        let (id, g) = &games[gi];
        run_one(cfg, gi, *id, g, trial)
    })?;

    let mut runs = Vec::with_capacity(jobs.len());
    let mut aborted = Vec::new();
    for (&(gi, trial), outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(r) => runs.push(r),
            Err(e) => {
                let id = games[gi].0.to_string();
                log::warn!("run {id} trial {trial} aborted: {e}");
                aborted.push((id, trial, e.to_string()));
            }
        }
    }
    if aborted.len() as f64 > cfg.fig6.max_abort_fraction * jobs.len() as f64 {
        return Err(Error::Numerical {
            step: 0,
            detail: format!("{} of {} runs aborted", aborted.len(), jobs.len()),
        });
    }
    let Some(first) = runs.first() else {
        return Err(Error::Numerical { step: 0, detail: "every run aborted".into() });
    };
    let times = first.times.clone();

    let all: Vec<&[f64]> = runs.iter().map(|r| r.mosaic_time_avg.as_slice()).collect();
    let pooled = AggregateStats::from_runs(&times, &all);
    let mut per_game = Vec::with_capacity(games.len());
    for (id, g) in &games {
        let name = id.to_string();
        let mine: Vec<&RunRecord> = runs.iter().filter(|r| r.game == name).collect();
        if mine.is_empty() {
            continue;
        }
        let series: Vec<&[f64]> = mine.iter().map(|r| r.mosaic_time_avg.as_slice()).collect();
        let finals: Vec<f64> = mine.iter().map(|r| *r.mosaic_time_avg.last().expect("non-empty")).collect();
        per_game.push(GameSummary {
            game: name,
            case: classify_case(g),
            aggregate: AggregateStats::from_runs(&times, &series),
            final_variance: if finals.len() > 1 { sample_variance(&finals) } else { 0.0 },
        });
    }
    let result = Fig6Result { runs, pooled, per_game, aborted };
    write_outputs(cfg, &result)?;
    Ok(result)
}

fn write_outputs(cfg: &ExperimentConfig, r: &Fig6Result) -> Result<()> {
    let dir = &cfg.out_dir;
    let mut w = create(dir, "fig6_series.csv", cfg)?;
    writeln!(w, "game_id,trial,t,mosaic_time_avg")?;
    for run in &r.runs {
        for (t, v) in run.times.iter().zip(&run.mosaic_time_avg) {
            writeln!(w, "{},{},{},{}", run.game, run.trial, t, v)?;
        }
    }
    w.flush()?;

    let mut w = create(dir, "fig6_report.csv", cfg)?;
    writeln!(w, "game_id,trial,T,external,internal,swap,mosaic")?;
    for run in &r.runs {
        let t = run.times.last().copied().unwrap_or(0.0);
        writeln!(w, "{},{},{},{},{},{},{}", run.game, run.trial, t, run.external, run.internal, run.swap, run.mosaic)?;
    }
    w.flush()?;

    let mut w = create(dir, "fig6_aggregate.csv", cfg)?;
    writeln!(w, "scope,t,mean,half_width,runs")?;
    let scopes = std::iter::once(("pooled", &r.pooled)).chain(r.per_game.iter().map(|g| (g.game.as_str(), &g.aggregate)));
    for (scope, agg) in scopes {
        for k in 0..agg.times.len() {
            writeln!(w, "{},{},{},{},{}", scope, agg.times[k], agg.mean[k], agg.half_width[k], agg.runs)?;
        }
    }
    w.flush()?;

    let mut w = create(dir, "fig6_games.csv", cfg)?;
    writeln!(w, "game_id,case,final_mean,final_half_width,variance")?;
    for g in &r.per_game {
        let hw = g.aggregate.half_width.last().copied().unwrap_or(0.0);
        writeln!(w, "{},{},{},{},{}", g.game, g.case.label(), g.aggregate.final_mean(), hw, g.final_variance)?;
    }
    w.flush()?;

    let mut w = create(dir, "fig6_starts.csv", cfg)?;
    writeln!(w, "game_id,trial,x1,y1")?;
    for run in &r.runs {
        writeln!(w, "{},{},{},{}", run.game, run.trial, run.x0[0], run.y0[0])?;
    }
    for (id, trial, err) in &r.aborted {
        writeln!(w, "# aborted {id} trial {trial}: {err}")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::IntegratorConfig;
    use crate::experiments::ExperimentKind;

    fn small(dir: &std::path::Path) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Fig6Mosaic);
        cfg.trials = 2;
        cfg.seed = 3;
        cfg.integrator = IntegratorConfig::new(1e-2, 20.0, 5);
        cfg.fig6.checkpoints = 4;
        cfg.out_dir = dir.to_path_buf();
        cfg
    }

    #[test]
    fn pooled_mean_is_the_trial_weighted_game_mean() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_fig6(&small(dir.path())).unwrap();
        assert_eq!(r.runs.len(), 288);
        assert_eq!(r.per_game.len(), 144);
        for k in 0..r.pooled.times.len() {
            let weighted: f64 = r.per_game.iter().map(|g| g.aggregate.mean[k] * g.aggregate.runs as f64).sum::<f64>() / 288.0;
            assert!((weighted - r.pooled.mean[k]).abs() < 1e-14);
        }
        assert_eq!(r.pooled.times.len(), r.per_game[0].aggregate.times.len());
        let series = std::fs::read_to_string(dir.path().join("fig6_series.csv")).unwrap();
        let rows = series.lines().filter(|l| !l.starts_with('#')).count() - 1;
        assert_eq!(rows, 288 * 4);
        assert!(series.starts_with("# phireg "));
    }

    #[test]
    fn normalization_uses_the_payoff_range() {
        for (_, g) in enumerate_144() {
            assert_eq!(payoff_range(&g), 3.0);
        }
    }
}
