//! Replicator dynamics: vector field, integration, conserved quantities and
//! orbit periodicity.

mod field;
mod integrate;
mod invariant;
mod period;

pub use field::rd_vector_field;
pub use integrate::{integrate, IntegratorConfig, Trajectory};
pub use invariant::{invariant_value, kl_divergence, InvariantSeries, KlInvariant};
pub use period::{detect_period, detect_period_with, PeriodOptions};
