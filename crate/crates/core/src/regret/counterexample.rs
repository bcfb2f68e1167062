use serde::Serialize;

use super::accumulator::{external_regret, mosaic_regret, swap_regret, SwapAccumulator};
use super::partition::Partition;
use crate::game::{classic, Game, JointDistribution, SimplexPoint};
use crate::stats::least_squares_slope;
use crate::{Error, Result};

/// Both players alternate between `(3/4, 1/4)` on even epochs and
/// `(1/4, 3/4)` on odd epochs of the diagonal coordination game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternatingProcess {
    pub epoch_len: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochRegret {
    /// Number of completed epochs.
    pub epoch: usize,
    pub external: f64,
    pub swap: f64,
    pub mosaic: f64,
}

pub fn cce_alternating_process(epoch_len: f64, horizon: f64) -> Result<AlternatingProcess> {
    if !(epoch_len > 0.0 && horizon >= epoch_len) {
        return Err(Error::Input("need 0 < epoch_len <= horizon".into()));
    }
    Ok(AlternatingProcess {
        epoch_len,
        epochs: (horizon / epoch_len).round() as usize,
    })
}

impl AlternatingProcess {
    pub fn game(&self) -> Game {
        classic::diagonal_coordination()
    }

    /// Common strategy of both players during `epoch`.
    pub fn strategy(&self, epoch: usize) -> SimplexPoint {
        let p = if epoch % 2 == 0 { 0.75 } else { 0.25 };
        SimplexPoint::binary(p).expect("valid probability")
    }

    /// Time-weighted average of the per-epoch product distributions over
    /// the first `epochs` epochs.
    pub fn empirical_joint(&self, epochs: usize) -> JointDistribution {
        let parts: Vec<(f64, JointDistribution)> = (0..epochs)
            .map(|e| {
                let s = self.strategy(e);
                (self.epoch_len, JointDistribution::product(&s, &s))
            })
            .collect();
        JointDistribution::mixture(&parts).expect("positive weights")
    }

    /// Row player's cumulative regrets after each epoch. Within an epoch
    /// play is constant, so the integrals are exact.
    pub fn regret_series(&self, part: &Partition) -> Result<Vec<EpochRegret>> {
        part.validate()?;
        let g = self.game();
        let mut acc = SwapAccumulator::new(2, part.bins());
        let mut u = vec![0.0; 2];
        let mut out = Vec::with_capacity(self.epochs);
        for e in 0..self.epochs {
            let s = self.strategy(e);
            g.row_utilities_into(s.as_slice(), &mut u);
            acc.add_constant_segment(part.bin_of(s.as_slice()), self.epoch_len, s.as_slice(), &u);
            out.push(EpochRegret {
                epoch: e + 1,
                external: external_regret(&acc),
                swap: swap_regret(&acc),
                mosaic: mosaic_regret(&acc),
            });
        }
        Ok(out)
    }

    /// Least-squares slopes of (external, mosaic) regret per epoch.
    pub fn slopes(series: &[EpochRegret]) -> (f64, f64) {
        let e: Vec<f64> = series.iter().map(|r| r.epoch as f64).collect();
        let ext: Vec<f64> = series.iter().map(|r| r.external).collect();
        let mos: Vec<f64> = series.iter().map(|r| r.mosaic).collect();
        (least_squares_slope(&e, &ext), least_squares_slope(&e, &mos))
    }
}
