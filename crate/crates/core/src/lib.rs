//! Numerical laboratory for replicator dynamics in two-player normal-form
//! games and the regret hierarchy it induces: external, internal, swap and
//! mosaic (partition-affine) regret.
//!
//! The crate is organised bottom-up:
//!
//! - [`game`]: payoff matrices, equilibria (Nash, correlated, coarse
//!   correlated), genericity and the rescaled zero-sum / coordination
//!   decomposition of 2x2 games.
//! - [`bruns`]: the twelve ordinal 2x2 basis games and the 144-game suite.
//! - [`dynamics`]: the replicator vector field, a fixed-step RK4 integrator
//!   with simplex projection, KL constants of motion and period detection.
//! - [`regret`]: swap accumulators over recorded trajectories, the regret
//!   hierarchy, conditional (band) averages and the counterexample processes.
//! - [`experiments`]: batch runners, aggregation and CSV/SVG emission used by
//!   the `phireg` command line tool.

pub mod bruns;
pub mod cli;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod game;
pub mod regret;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use game::{Game, JointDistribution, Player, SimplexPoint};
