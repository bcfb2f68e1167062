//! Command line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bruns::{enumerate_144, BrunsGameId};
use crate::dynamics::{integrate, IntegratorConfig, Trajectory};
use crate::experiments::{self, child_rng, random_interior, ExperimentConfig, ExperimentKind};
use crate::game::{classic, classify_case, Game, Player, SimplexPoint};
use crate::regret::{accumulate_series, Partition, RegretReport};
use crate::verify::run_invariant_suite;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "phireg", version, about = "Replicator dynamics and the regret hierarchy in normal-form games")]
pub struct Cli {
    /// Experiment configuration (JSON); unknown keys are rejected.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, or output file for `simulate`.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the replicator dynamics and print the trajectory as CSV.
    Simulate(RunArgs),
    /// The 144-game Bruns suite.
    Bruns {
        #[command(subcommand)]
        action: BrunsAction,
    },
    /// Integrate, then print the regret report of the row player as JSON.
    Regret {
        #[command(flatten)]
        run: RunArgs,
        /// Equal-width cells on the first coordinate (0 for the singleton partition).
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Run a batch experiment.
    Experiment {
        #[arg(value_enum)]
        which: Which,
        /// Trials per game; overrides the configuration.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Run the invariant self-check.
    Verify,
}

#[derive(Debug, Subcommand)]
enum BrunsAction {
    /// Print every game id with its case.
    List,
    /// Write every game as JSON into `--out`.
    Export,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Fig5b,
    Fig6,
    Fig7,
    Counterexamples,
}

impl Which {
    fn kind(self) -> ExperimentKind {
        match self {
            Which::Fig5b => ExperimentKind::Fig5bFields,
            Which::Fig6 => ExperimentKind::Fig6Mosaic,
            Which::Fig7 => ExperimentKind::Fig7Conditional,
            Which::Counterexamples => ExperimentKind::CceCounterexample,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Game JSON file, a Bruns id such as `BaxAs`, or one of
    /// `matching_pennies`, `coordination`, `rps_a1`, `rps_a2`, `rps_a3`.
    #[arg(long)]
    game: String,
    /// Horizon.
    #[arg(long = "T", value_name = "T", allow_negative_numbers = true)]
    horizon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long)]
    stride: Option<usize>,
    /// Row start, comma separated; random when omitted.
    #[arg(long, value_delimiter = ',')]
    x0: Option<Vec<f64>>,
    /// Column start, comma separated; random when omitted.
    #[arg(long, value_delimiter = ',')]
    y0: Option<Vec<f64>>,
}

fn load_game(spec: &str) -> Result<Game> {
    let path = Path::new(spec);
    if path.is_file() {
        return Game::from_json(&fs::read_to_string(path)?);
    }
    match spec {
        "matching_pennies" | "mp" => return Ok(classic::matching_pennies()),
        "coordination" => return Ok(classic::diagonal_coordination()),
        "rps_a1" => return Ok(classic::rps_a1()),
        "rps_a2" => return Ok(classic::rps_a2()),
        "rps_a3" => return Ok(classic::rps_a3()),
        _ => {}
    }
    match spec.parse::<BrunsGameId>() {
        Ok(id) => Ok(crate::bruns::build_game(id)),
        Err(_) => Err(Error::Input(format!("{spec:?} is neither a file, a Bruns id nor a named game"))),
    }
}

fn load_config(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::from_json(&fs::read_to_string(path)?)?;
            if cfg.experiment.cli_name() != kind.cli_name() {
                return Err(Error::Input(format!(
                    "configuration is for {}, not {}",
                    cfg.experiment.cli_name(),
                    kind.cli_name()
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(kind),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

/// Integrator and partition from `--config` when given, defaults otherwise.
fn run_settings(cli: &Cli) -> Result<(IntegratorConfig, Partition, u64)> {
    let (integrator, partition, seed) = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::from_json(&fs::read_to_string(path)?)?;
            (cfg.integrator, cfg.partition, cfg.seed)
        }
        None => (IntegratorConfig::default(), Partition::intervals(10), 0),
    };
    Ok((integrator, partition, cli.seed.unwrap_or(seed)))
}

fn simulate(run: &RunArgs, base: IntegratorConfig, seed: u64) -> Result<Trajectory> {
    let g = load_game(&run.game)?;
    let mut cfg = base;
    if let Some(t) = run.horizon {
        cfg.horizon = t;
    }
    if let Some(dt) = run.dt {
        cfg.dt = dt;
    }
    if let Some(s) = run.stride {
        cfg.record_stride = s;
    }
    cfg.validate()?;
    let mut rng = child_rng(seed, 0, 0);
    let x0 = match &run.x0 {
        Some(v) => SimplexPoint::new(v.clone())?,
        None => random_interior(&mut rng, g.n(), 0.01),
    };
    let y0 = match &run.y0 {
        Some(v) => SimplexPoint::new(v.clone())?,
        None => random_interior(&mut rng, g.m(), 0.01),
    };
    integrate(&g, &x0, &y0, &cfg)
}

fn say(line: &str) -> io::Result<()> {
    writeln!(io::stdout().lock(), "{line}")
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(run) => {
            let (integrator, _, seed) = run_settings(cli)?;
            let traj = simulate(run, integrator, seed)?;
            match &cli.out {
                Some(path) => {
                    let mut w = io::BufWriter::new(fs::File::create(path)?);
                    traj.write_csv(&mut w)?;
                    w.flush()?;
                }
                None => {
                    let mut w = io::BufWriter::new(io::stdout().lock());
                    traj.write_csv(&mut w)?;
                    w.flush()?;
                }
            }
        }
        Command::Bruns { action: BrunsAction::List } => {
            let mut out = io::BufWriter::new(io::stdout().lock());
            for (id, g) in enumerate_144() {
                writeln!(out, "{id}\t{}", classify_case(&g).label())?;
            }
            out.flush()?;
        }
        Command::Bruns { action: BrunsAction::Export } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("bruns"));
            fs::create_dir_all(&dir)?;
            for (id, g) in enumerate_144() {
                fs::write(dir.join(format!("{id}.json")), g.to_json())?;
            }
            say(&format!("wrote 144 games to {}", dir.display()))?;
        }
        Command::Regret { run, bins } => {
            let (integrator, mut partition, seed) = run_settings(cli)?;
            match bins {
                Some(0) => partition = Partition::Singleton,
                Some(k) => partition = Partition::intervals(*k),
                None => {}
            }
            let traj = simulate(run, integrator, seed)?;
            let every = ((traj.len() - 1) / 100).max(1);
            let (acc, series) = accumulate_series(&traj, &partition, Player::Row, every)?;
            let report = RegretReport::new(&acc, &series);
            say(&serde_json::to_string_pretty(&report)?)?;
        }
        Command::Experiment { which, trials } => {
            let mut cfg = load_config(cli, which.kind())?;
            if let Some(t) = trials {
                cfg.trials = *t;
            }
            let summary = experiments::run(&cfg)?;
            say(&format!("{summary}\noutputs in {}", cfg.out_dir.display()))?;
        }
        Command::Verify => {
            let checks = run_invariant_suite()?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                say(&format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))?;
            }
            if failed > 0 {
                return Err(Error::Numerical { step: 0, detail: format!("{failed} invariant checks failed") });
            }
        }
    }
    Ok(())
}

/// Parse `args` (program name first), run, and return the process exit
/// code: 0 on success, 1 on bad input, 2 on numerical failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        // a closed pipe downstream (`| head`) is not a failure
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_forms() {
        let cli = Cli::try_parse_from(["phireg", "simulate", "--game", "mp.json", "--T", "100"]).unwrap();
        match cli.command {
            Command::Simulate(r) => assert_eq!(r.horizon, Some(100.0)),
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["phireg", "experiment", "fig6", "--seed", "7", "--out", "runs/"]).unwrap();
        assert_eq!(cli.seed, Some(7));
        assert!(Cli::try_parse_from(["phireg", "verify", "--bogus"]).is_err());
    }

    #[test]
    fn unknown_flag_exits_one() {
        assert_eq!(run(["phireg", "simulate", "--frobnicate"]), 1);
    }

    #[test]
    fn games_by_name_and_id() {
        assert_eq!(load_game("BaxAs").unwrap(), crate::bruns::build_game("BaxAs".parse().unwrap()));
        assert_eq!(load_game("rps_a2").unwrap(), classic::rps_a2());
        assert!(load_game("nonsense").is_err());
    }
}
