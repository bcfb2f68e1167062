use std::io::Write;

use serde::Serialize;

use super::output::{create, join};
use super::{child_rng, par_map, random_interior, ExperimentConfig};
use crate::dynamics::{integrate, kl_divergence, Trajectory};
use crate::game::{classic, nash_support_enumeration, Game, Player, SimplexPoint};
use crate::regret::{empirical_conditional_average, Band, ConditionalAverageSeries};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig7GameResult {
    pub name: String,
    pub x_star: SimplexPoint,
    pub y_star: SimplexPoint,
    pub reference_time: f64,
    /// `KL(x_r | x*)`.
    pub reference: f64,
    pub eps: f64,
    pub attempts: usize,
    /// Samples inside the band, over all trials.
    pub retained: usize,
    pub times: Vec<f64>,
    /// Pooled running conditional average of the column strategy.
    pub averages: Vec<Option<Vec<f64>>>,
    /// Sup-distance of the final average from `y*`.
    pub error: f64,
}

impl Fig7GameResult {
    pub fn final_average(&self) -> &[f64] {
        self.averages.last().and_then(|m| m.as_deref()).expect("band was visited")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fig7Result {
    pub games: Vec<Fig7GameResult>,
}

impl Fig7Result {
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .games
            .iter()
            .map(|g| format!("{} average [{}] vs y* [{}] error {:.2e}", g.name, fmt_vec(g.final_average()), fmt_vec(g.y_star.as_slice()), g.error))
            .collect();
        format!("fig7: {}", parts.join("; "))
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

/// The three rock-paper-scissors variants.
pub fn fig7_games() -> Vec<(&'static str, Game)> {
    vec![("A1", classic::rps_a1()), ("A2", classic::rps_a2()), ("A3", classic::rps_a3())]
}

fn interior_equilibrium(g: &Game) -> Result<(SimplexPoint, SimplexPoint)> {
    nash_support_enumeration(g)?
        .into_iter()
        .find(|(x, y)| x.is_interior(1e-12) && y.is_interior(1e-12))
        .ok_or(Error::NoInteriorNash)
}

/// Pool per-trial running averages checkpoint by checkpoint, weighting each
/// trial by its time in the band.
fn pool(series: &[ConditionalAverageSeries]) -> Vec<Option<Vec<f64>>> {
    let len = series[0].times.len();
    (0..len)
        .map(|k| {
            let mut num: Option<Vec<f64>> = None;
            let mut den = 0.0;
            for s in series {
                if let Some(m) = &s.means[k] {
                    let w = s.weights[k];
                    let acc = num.get_or_insert_with(|| vec![0.0; m.len()]);
                    for (a, v) in acc.iter_mut().zip(m) {
                        *a += w * v;
                    }
                    den += w;
                }
            }
            num.map(|v| v.into_iter().map(|a| a / den).collect())
        })
        .collect()
}

fn run_game(cfg: &ExperimentConfig, index: usize, name: &str, g: &Game) -> Result<(Fig7GameResult, Vec<Trajectory>)> {
    let (x_star, y_star) = interior_equilibrium(g)?;
    let jobs: Vec<usize> = (0..cfg.trials).collect();
    let trajs = par_map(&jobs, |&trial| {
        let mut rng = child_rng(cfg.seed, index, trial);
        let x0 = random_interior(&mut rng, 3, 0.01);
        let y0 = random_interior(&mut rng, 3, 0.01);
        integrate(g, &x0, &y0, &cfg.integrator)
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let first = &trajs[0];
    let r = ((first.len() - 1) as f64 * cfg.fig7.reference_fraction).round() as usize;
    let reference_time = first.time(r);
    let reference = kl_divergence(first.x(r), x_star.as_slice());
    let mut eps = cfg.fig7.eps_factor * reference;
    for attempt in 1..=cfg.fig7.max_attempts {
        let band = Band::Kl { center: x_star.as_slice().to_vec(), reference, eps };
        let series = trajs
            .iter()
            .map(|t| empirical_conditional_average(t, &band, Player::Row))
            .collect::<Result<Vec<_>>>()?;
        let retained: usize = series.iter().map(|s| s.samples).sum();
        if retained == 0 {
            log::warn!("{name}: band eps {eps:.3e} retained nothing; doubling");
            eps *= 2.0;
            continue;
        }
        let averages = pool(&series);
        let last = averages.last().and_then(|m| m.as_deref()).expect("retained samples");
        let error = last.iter().zip(y_star.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let result = Fig7GameResult {
            name: name.to_string(),
            x_star,
            y_star,
            reference_time,
            reference,
            eps,
            attempts: attempt,
            retained,
            times: series[0].times.clone(),
            averages,
            error,
        };
        return Ok((result, trajs));
    }
    Err(Error::Numerical {
        step: 0,
        detail: format!("{name}: KL band empty after {} attempts", cfg.fig7.max_attempts),
    })
}

/// Conditional column averages on KL bands around the row equilibrium.
pub fn run_fig7(cfg: &ExperimentConfig) -> Result<Fig7Result> {
    cfg.validate()?;
    let mut games = Vec::new();
    for (index, (name, g)) in fig7_games().into_iter().enumerate() {
        let (res, trajs) = run_game(cfg, index, name, &g)?;
        write_game(cfg, &res, &trajs)?;
        games.push(res);
    }
    let mut w = create(&cfg.out_dir, "fig7_summary.csv", cfg)?;
    writeln!(w, "game,reference_time,reference,eps,attempts,retained,ybar1,ybar2,ybar3,ystar1,ystar2,ystar3,error")?;
    for g in &games {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            g.name,
            g.reference_time,
            g.reference,
            g.eps,
            g.attempts,
            g.retained,
            join(g.final_average()),
            join(g.y_star.as_slice()),
            g.error
        )?;
    }
    w.flush()?;
    Ok(Fig7Result { games })
}

fn write_game(cfg: &ExperimentConfig, res: &Fig7GameResult, trajs: &[Trajectory]) -> Result<()> {
    let dir = &cfg.out_dir;
    let band = Band::Kl { center: res.x_star.as_slice().to_vec(), reference: res.reference, eps: res.eps };
    let header = "trial,t,x1,x2,x3,y1,y2,y3";
    let mut raw = create(dir, &format!("fig7_{}_raw.csv", res.name), cfg)?;
    let mut kept = create(dir, &format!("fig7_{}_retained.csv", res.name), cfg)?;
    writeln!(raw, "{header}")?;
    writeln!(kept, "{header}")?;
    for (trial, traj) in trajs.iter().enumerate() {
        for k in 0..traj.len() {
            let line = format!("{},{},{},{}", trial, traj.time(k), join(traj.x(k)), join(traj.y(k)));
            if k % cfg.fig7.scatter_thin == 0 {
                writeln!(raw, "{line}")?;
            }
            if band.contains(traj.x(k)) {
                writeln!(kept, "{line}")?;
            }
        }
    }
    raw.flush()?;
    kept.flush()?;

    let mut w = create(dir, &format!("fig7_{}_average.csv", res.name), cfg)?;
    writeln!(w, "# column equilibrium: {}", join(res.y_star.as_slice()))?;
    writeln!(w, "t,ybar1,ybar2,ybar3")?;
    for (t, m) in res.times.iter().zip(&res.averages) {
        if let Some(m) = m {
            writeln!(w, "{},{}", t, join(m))?;
        }
    }
    w.flush()?;
    Ok(())
}
