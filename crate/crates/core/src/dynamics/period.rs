use super::integrate::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOptions {
    /// Return threshold on the sup-norm distance to the initial state.
    pub eps: f64,
    /// Earliest admissible period; `None` means ten sample spacings.
    pub t_min: Option<f64>,
}

impl PeriodOptions {
    pub fn new(eps: f64) -> Self {
        PeriodOptions { eps, t_min: None }
    }
}

/// Coordinates compared by the return test: `(x1, y1)` for 2x2 games,
/// the full joint state otherwise.
fn coords(traj: &Trajectory) -> Vec<usize> {
    let n = traj.game().n();
    if n == 2 && traj.game().m() == 2 {
        vec![0, n]
    } else {
        (0..traj.dim()).collect()
    }
}

fn sup_dist(a: &[f64], b: &[f64], idx: &[usize]) -> f64 {
    idx.iter().fold(0.0, |m, &i| m.max((a[i] - b[i]).abs()))
}

/// Golden-section minimisation of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - r * (hi - lo);
    let mut d = lo + r * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if hi - lo < 1e-13 * (1.0 + hi.abs()) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - r * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + r * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

pub fn detect_period(traj: &Trajectory, eps: f64) -> Option<f64> {
    detect_period_with(traj, PeriodOptions::new(eps))
}

/// First return time to the initial state. Sample-level local minima of the
/// distance to the start are refined on the Hermite interpolant; the first
/// refined minimum below `eps` that follows a displacement above `eps` and
/// lies beyond `t_min` is reported.
pub fn detect_period_with(traj: &Trajectory, opts: PeriodOptions) -> Option<f64> {
    if traj.len() < 3 {
        return None;
    }
    let idx = coords(traj);
    let start = traj.state(0).to_vec();
    let t_min = opts.t_min.unwrap_or(10.0 * traj.spacing());
    let dist: Vec<f64> = (0..traj.len()).map(|k| sup_dist(traj.state(k), &start, &idx)).collect();
    let displaced = dist.iter().position(|&d| d > opts.eps)?;
    for k in displaced.max(1)..traj.len() - 1 {
        if !(dist[k] <= dist[k - 1] && dist[k] <= dist[k + 1]) {
            continue;
        }
        if traj.time(k + 1) <= t_min {
            continue;
        }
        let (t, d) = golden_min(
            |t| sup_dist(&traj.interpolate(t), &start, &idx),
            traj.time(k - 1).max(t_min),
            traj.time(k + 1),
        );
        if d < opts.eps {
            return Some(t);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruns::{build_game, BrunsGameId};
    use crate::dynamics::{integrate, IntegratorConfig};
    use crate::game::{classic, SimplexPoint};

    #[test]
    fn matching_pennies_small_orbit_has_harmonic_period() {
        // linearisation at the centre: x1' = -2 (y1 - 1/2) ..., angular frequency 1
        let g = classic::matching_pennies();
        let x0 = SimplexPoint::new(vec![0.501, 0.499]).unwrap();
        let traj = integrate(&g, &x0, &SimplexPoint::uniform(2), &IntegratorConfig::new(1e-3, 20.0, 10)).unwrap();
        let p = detect_period(&traj, 1e-4).unwrap();
        assert!((p - std::f64::consts::TAU).abs() < 1e-4, "period {p}");
    }

    #[test]
    fn case_one_orbit_returns() {
        let g = build_game(BrunsGameId::new("Ba", "As").unwrap());
        let x0 = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let y0 = SimplexPoint::new(vec![0.6, 0.4]).unwrap();
        let traj = integrate(&g, &x0, &y0, &IntegratorConfig::new(1e-3, 100.0, 10)).unwrap();
        let p = detect_period(&traj, 1e-4).unwrap();
        let back = traj.interpolate(p);
        assert!((back[0] - 0.3).abs() < 1e-4 && (back[2] - 0.6).abs() < 1e-4);
        // the next return is one period later
        let opts = PeriodOptions { eps: 1e-4, t_min: Some(p + 1.0) };
        let p2 = detect_period_with(&traj, opts).unwrap();
        assert!((p2 - 2.0 * p).abs() < 1e-3, "{p} {p2}");
    }

    #[test]
    fn dominance_solvable_game_has_no_period() {
        let g = build_game(BrunsGameId::new("Pd", "Pd").unwrap());
        let x0 = SimplexPoint::new(vec![0.4, 0.6]).unwrap();
        let traj = integrate(&g, &x0, &x0, &IntegratorConfig::new(1e-3, 200.0, 10)).unwrap();
        assert_eq!(detect_period(&traj, 1e-4), None);
    }

    #[test]
    fn rest_point_is_not_periodic() {
        let g = classic::matching_pennies();
        let h = SimplexPoint::uniform(2);
        let traj = integrate(&g, &h, &h, &IntegratorConfig::new(1e-3, 10.0, 10)).unwrap();
        assert_eq!(detect_period(&traj, 1e-4), None);
    }
}
