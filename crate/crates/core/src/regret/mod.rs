//! Regret of recorded strategy processes.
//!
//! A [`SwapAccumulator`] integrates `x_a(t) u_b(t)` per partition cell. Every
//! regret notion below is a function of those matrices:
//!
//! - external: best fixed action against the realized utility stream;
//! - internal: best single-action swap `a -> b`;
//! - swap: best map of actions to actions, `sum_a max_b S[a][b]`;
//! - mosaic: best deviation that is affine on each cell of a partition.
//!
//! For mosaic regret the deviation value on a cell is linear in the affine
//! map, and the affine self-maps of the simplex form a polytope whose
//! vertices send every vertex to a vertex. The maximum is therefore attained
//! by a pure swap function chosen independently per cell, which gives
//! `sum_k sum_a max_b S_k[a][b]`.

mod accumulator;
mod band;
mod conditional;
mod counterexample;
mod partition;

pub use accumulator::{
    accumulate, accumulate_series, external_regret, internal_regret, mosaic_regret, swap_regret,
    swap_value, RegretPoint, RegretReport, SwapAccumulator,
};
pub use band::{band_regret_bound_check, BandRegretCheck, BandVisit};
pub use conditional::{
    empirical_conditional_average, predicted_conditional_average, Band, ConditionalAverageSeries,
    Crossing, Prediction,
};
pub use counterexample::{cce_alternating_process, AlternatingProcess, EpochRegret};
pub use partition::Partition;
