use serde::Serialize;

use super::partition::Partition;
use crate::dynamics::Trajectory;
use crate::game::Player;
use crate::{Error, Result};

/// Per-cell swap matrices `S_k[a][b] = int x_a u_b 1[x in cell k] dt`, the
/// time spent in each cell and the raw utility integral `int u dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapAccumulator {
    n: usize,
    bins: usize,
    /// `bins * n * n`, cell-major then row-major.
    s: Vec<f64>,
    occupancy: Vec<f64>,
    raw_utility: Vec<f64>,
}

impl SwapAccumulator {
    pub fn new(n: usize, bins: usize) -> Self {
        assert!(n >= 1 && bins >= 1, "accumulator needs at least one action and one cell");
        SwapAccumulator {
            n,
            bins,
            s: vec![0.0; bins * n * n],
            occupancy: vec![0.0; bins],
            raw_utility: vec![0.0; n],
        }
    }

    /// Assemble an accumulator from explicit cell matrices.
    pub fn from_parts(cells: &[Vec<Vec<f64>>], occupancy: &[f64], raw_utility: &[f64]) -> Result<Self> {
        let n = raw_utility.len();
        if cells.is_empty() || occupancy.len() != cells.len() {
            return Err(Error::Dimension("one occupancy per cell is required".into()));
        }
        let mut acc = SwapAccumulator::new(n, cells.len());
        for (k, cell) in cells.iter().enumerate() {
            if cell.len() != n || cell.iter().any(|r| r.len() != n) {
                return Err(Error::Dimension(format!("cell {k} is not {n}x{n}")));
            }
            for (a, row) in cell.iter().enumerate() {
                acc.s[(k * n + a) * n..(k * n + a + 1) * n].copy_from_slice(row);
            }
        }
        acc.occupancy.copy_from_slice(occupancy);
        acc.raw_utility.copy_from_slice(raw_utility);
        Ok(acc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    fn cell(&self, k: usize) -> &[f64] {
        &self.s[k * self.n * self.n..(k + 1) * self.n * self.n]
    }

    pub fn bin_matrix(&self, k: usize) -> Vec<Vec<f64>> {
        self.cell(k).chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `sum_k S_k`.
    pub fn summed_matrix(&self) -> Vec<Vec<f64>> {
        let nn = self.n * self.n;
        let mut flat = self.cell(0).to_vec();
        for k in 1..self.bins {
            for (t, v) in flat.iter_mut().zip(&self.s[k * nn..(k + 1) * nn]) {
                *t += v;
            }
        }
        flat.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn occupancy(&self) -> &[f64] {
        &self.occupancy
    }

    /// Total integrated time.
    pub fn horizon(&self) -> f64 {
        self.occupancy.iter().sum()
    }

    /// `int u dt`.
    pub fn raw_utility(&self) -> &[f64] {
        &self.raw_utility
    }

    /// `int <x, u> dt = sum_k trace S_k`.
    pub fn realized(&self) -> f64 {
        (0..self.bins)
            .map(|k| {
                let c = self.cell(k);
                (0..self.n).map(|a| c[a * self.n + a]).sum::<f64>()
            })
            .sum()
    }

    /// Trapezoid over one interval of length `h` assigned to cell `bin`.
    pub fn add_trapezoid(&mut self, bin: usize, h: f64, x0: &[f64], u0: &[f64], x1: &[f64], u1: &[f64]) {
        let n = self.n;
        let half = 0.5 * h;
        let c = &mut self.s[bin * n * n..(bin + 1) * n * n];
        for a in 0..n {
            for b in 0..n {
                c[a * n + b] += half * (x0[a] * u0[b] + x1[a] * u1[b]);
            }
        }
        for b in 0..n {
            self.raw_utility[b] += half * (u0[b] + u1[b]);
        }
        self.occupancy[bin] += h;
    }

    /// Exact integral of constant play `x` against constant utility `u`.
    pub fn add_constant_segment(&mut self, bin: usize, duration: f64, x: &[f64], u: &[f64]) {
        self.add_trapezoid(bin, duration, x, u, x, u);
    }
}

/// `sum_a max_b S[a][b]`: the value of the best swap function.
pub fn swap_value(s: &[Vec<f64>]) -> f64 {
    s.iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum()
}

fn flat_swap_value(c: &[f64], n: usize) -> f64 {
    c.chunks(n)
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum()
}

/// `max_a int u_a dt - int <x, u> dt`.
pub fn external_regret(acc: &SwapAccumulator) -> f64 {
    acc.raw_utility.iter().copied().fold(f64::NEG_INFINITY, f64::max) - acc.realized()
}

/// Best single swap `a -> b` (all other actions kept), never negative since
/// the identity is admissible.
pub fn internal_regret(acc: &SwapAccumulator) -> f64 {
    let s = acc.summed_matrix();
    let mut best: f64 = 0.0;
    for (a, row) in s.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if a != b {
                best = best.max(v - row[a]);
            }
        }
    }
    best
}

pub fn swap_regret(acc: &SwapAccumulator) -> f64 {
    swap_value(&acc.summed_matrix()) - acc.realized()
}

/// `sum_k sum_a max_b S_k[a][b] - int <x, u> dt`.
pub fn mosaic_regret(acc: &SwapAccumulator) -> f64 {
    let n = acc.n;
    if acc.bins == 1 {
        return swap_regret(acc);
    }
    (0..acc.bins).map(|k| flat_swap_value(acc.cell(k), n)).sum::<f64>() - acc.realized()
}

/// Integrate the swap matrices of `player` along `traj`. Each sample
/// interval is assigned to the cell of its left endpoint.
pub fn accumulate(traj: &Trajectory, part: &Partition, player: Player) -> Result<SwapAccumulator> {
    Ok(accumulate_series(traj, part, player, 0)?.0)
}

/// Regret values after `t` time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegretPoint {
    pub t: f64,
    pub external: f64,
    pub swap: f64,
    pub mosaic: f64,
}

/// As [`accumulate`], also returning a checkpoint every `every` sample
/// intervals (none when `every == 0`). The final time is always included
/// when checkpoints are requested.
pub fn accumulate_series(
    traj: &Trajectory,
    part: &Partition,
    player: Player,
    every: usize,
) -> Result<(SwapAccumulator, Vec<RegretPoint>)> {
    part.validate()?;
    if traj.len() < 2 {
        return Err(Error::Input("trajectory needs at least two samples".into()));
    }
    let g = traj.game();
    let n = g.strategies(player);
    if let Partition::KlBands { center, .. } = part {
        if center.len() != n {
            return Err(Error::Dimension("KL band center does not match the player".into()));
        }
    }
    let mut acc = SwapAccumulator::new(n, part.bins());
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut points = Vec::new();
    let h = traj.spacing();
    traj.utilities_into(0, player, &mut u0);
    let last = traj.len() - 1;
    for k in 0..last {
        traj.utilities_into(k + 1, player, &mut u1);
        let x0 = traj.strategy(k, player);
        let x1 = traj.strategy(k + 1, player);
        acc.add_trapezoid(part.bin_of(x0), h, x0, &u0, x1, &u1);
        std::mem::swap(&mut u0, &mut u1);
        if every > 0 && ((k + 1) % every == 0 || k + 1 == last) {
            points.push(RegretPoint {
                t: traj.time(k + 1),
                external: external_regret(&acc),
                swap: swap_regret(&acc),
                mosaic: mosaic_regret(&acc),
            });
        }
    }
    Ok((acc, points))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretReport {
    pub horizon: f64,
    pub external: f64,
    pub internal: f64,
    pub swap: f64,
    pub mosaic: f64,
    /// `best_deviation[k][a]`: action that `a` is sent to on cell `k`.
    pub best_deviation: Vec<Vec<usize>>,
    /// `(t, MR^t / t)`.
    pub mosaic_time_avg: Vec<(f64, f64)>,
}

impl RegretReport {
    pub fn new(acc: &SwapAccumulator, series: &[RegretPoint]) -> Self {
        let best_deviation = (0..acc.bins)
            .map(|k| {
                acc.bin_matrix(k)
                    .iter()
                    .map(|row| {
                        let mut arg = 0;
                        for (b, v) in row.iter().enumerate() {
                            if *v > row[arg] {
                                arg = b;
                            }
                        }
                        arg
                    })
                    .collect()
            })
            .collect();
        RegretReport {
            horizon: acc.horizon(),
            external: external_regret(acc),
            internal: internal_regret(acc),
            swap: swap_regret(acc),
            mosaic: mosaic_regret(acc),
            best_deviation,
            mosaic_time_avg: series.iter().map(|p| (p.t, p.mosaic / p.t)).collect(),
        }
    }
}
