use serde::{Deserialize, Serialize};

use crate::dynamics::{kl_divergence, rd_vector_field, Trajectory};
use crate::game::{Player, SimplexPoint};
use crate::{Error, Result};

/// Set of own strategies on which the opponent's play is averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Band {
    /// `|p_1 - sigma| <= eps`.
    Interval { sigma: f64, eps: f64 },
    /// `|KL(p | center) - reference| <= eps`.
    Kl {
        center: Vec<f64>,
        reference: f64,
        eps: f64,
    },
}

impl Band {
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Band::Interval { sigma, eps } => (p[0] - sigma).abs() <= *eps,
            Band::Kl { center, reference, eps } => (kl_divergence(p, center) - reference).abs() <= *eps,
        }
    }

    fn eps(&self) -> f64 {
        match self {
            Band::Interval { eps, .. } | Band::Kl { eps, .. } => *eps,
        }
    }

    /// Same band with a different half-width.
    pub fn with_eps(&self, eps: f64) -> Band {
        match self.clone() {
            Band::Interval { sigma, .. } => Band::Interval { sigma, eps },
            Band::Kl { center, reference, .. } => Band::Kl { center, reference, eps },
        }
    }
}

/// Running average of the opponent's strategy over times at which the
/// observer's own strategy lies in the band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalAverageSeries {
    pub band: Band,
    pub observer: Player,
    pub times: Vec<f64>,
    /// `None` until the band has been visited.
    pub means: Vec<Option<Vec<f64>>>,
    /// Time spent in the band up to each checkpoint.
    pub weights: Vec<f64>,
    /// Time spent in the band.
    pub occupancy: f64,
    /// Number of samples inside the band.
    pub samples: usize,
}

impl ConditionalAverageSeries {
    pub fn is_empty(&self) -> bool {
        self.occupancy == 0.0
    }

    /// Average at the end of the trajectory.
    pub fn mean(&self) -> Option<&[f64]> {
        self.means.last().and_then(|m| m.as_deref())
    }
}

/// Trapezoidal `int y 1[x in band] dt / int 1[x in band] dt`, sampled about
/// a thousand times along the trajectory.
pub fn empirical_conditional_average(
    traj: &Trajectory,
    band: &Band,
    observer: Player,
) -> Result<ConditionalAverageSeries> {
    if !(band.eps() > 0.0) {
        return Err(Error::Input("band half-width must be positive".into()));
    }
    if traj.is_empty() {
        return Err(Error::Input("empty trajectory".into()));
    }
    let other = observer.opponent();
    let m = traj.game().strategies(other);
    let h = traj.spacing();
    let every = ((traj.len() - 1) / 1000).max(1);
    let inside: Vec<bool> = (0..traj.len()).map(|k| band.contains(traj.strategy(k, observer))).collect();
    let mut num = vec![0.0; m];
    let mut den = 0.0;
    let mut times = Vec::new();
    let mut means = Vec::new();
    let mut weights = Vec::new();
    for k in 0..traj.len() - 1 {
        for (end, w) in [(k, inside[k]), (k + 1, inside[k + 1])] {
            if w {
                let y = traj.strategy(end, other);
                for j in 0..m {
                    num[j] += 0.5 * h * y[j];
                }
                den += 0.5 * h;
            }
        }
        if (k + 1) % every == 0 || k + 2 == traj.len() {
            times.push(traj.time(k + 1));
            means.push((den > 0.0).then(|| num.iter().map(|v| v / den).collect()));
            weights.push(den);
        }
    }
    Ok(ConditionalAverageSeries {
        band: band.clone(),
        observer,
        times,
        means,
        weights,
        occupancy: den,
        samples: inside.iter().filter(|&&b| b).count(),
    })
}

/// Passage of an orbit through `x_1 = sigma`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub t: f64,
    /// Column strategy at the crossing.
    pub nu: Vec<f64>,
    /// `|dx_1/dt|` at the crossing.
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub mean: SimplexPoint,
    pub crossings: [Crossing; 2],
}

fn refine_crossing(traj: &Trajectory, k: usize, sigma: f64) -> Result<Crossing> {
    let f = |t: f64| traj.interpolate(t)[0] - sigma;
    let (mut lo, mut hi) = (traj.time(k), traj.time(k + 1));
    let flo = f(lo);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    let z = traj.interpolate(t);
    let x = SimplexPoint::normalized(z[..2].to_vec())?;
    let y = SimplexPoint::normalized(z[2..].to_vec())?;
    let (dx, _) = rd_vector_field(traj.game(), &x, &y);
    let speed = dx[0].abs();
    if speed < 1e-9 {
        return Err(Error::Refused(format!("tangential crossing of x1 = {sigma} at t = {t}")));
    }
    Ok(Crossing { t, nu: y.as_slice().to_vec(), speed })
}

/// Band average predicted from the two orbit crossings of `x_1 = sigma`:
/// `(nu_1 / v_1 + nu_2 / v_2) / (1 / v_1 + 1 / v_2)`, where `v_i` is the
/// speed of `x_1` at crossing `i`.
pub fn predicted_conditional_average(traj: &Trajectory, sigma: f64) -> Result<Prediction> {
    let g = traj.game();
    if g.n() != 2 || g.m() != 2 {
        return Err(Error::Dimension("crossing prediction needs a 2x2 game".into()));
    }
    let xs: Vec<f64> = (0..traj.len()).map(|k| traj.x(k)[0]).collect();
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(sigma > lo && sigma < hi) {
        return Err(Error::Refused(format!(
            "sigma = {sigma} lies outside the orbit range [{lo}, {hi}]"
        )));
    }
    let up = (0..xs.len() - 1).find(|&k| xs[k] < sigma && xs[k + 1] >= sigma);
    let down = (0..xs.len() - 1).find(|&k| xs[k] >= sigma && xs[k + 1] < sigma);
    let (Some(up), Some(down)) = (up, down) else {
        return Err(Error::Refused(format!("orbit does not cross x1 = {sigma} in both directions")));
    };
    let c1 = refine_crossing(traj, up, sigma)?;
    let c2 = refine_crossing(traj, down, sigma)?;
    let (w1, w2) = (1.0 / c1.speed, 1.0 / c2.speed);
    let mean = (0..2).map(|j| (w1 * c1.nu[j] + w2 * c2.nu[j]) / (w1 + w2)).collect();
    Ok(Prediction {
        mean: SimplexPoint::normalized(mean)?,
        crossings: [c1, c2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorConfig};
    use crate::game::{classic, interior_nash_2x2, Game};

    #[test]
    fn constant_play_inside_band() {
        let g = classic::matching_pennies();
        let x = SimplexPoint::new(vec![0.6, 0.4]).unwrap();
        let y = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let traj = Trajectory::from_samples(&g, 0.1, (0..50).map(|_| (x.clone(), y.clone()))).unwrap();
        let s = empirical_conditional_average(&traj, &Band::Interval { sigma: 0.6, eps: 0.01 }, Player::Row).unwrap();
        let mean = s.mean().unwrap();
        assert!((mean[0] - 0.3).abs() < 1e-12 && (mean[1] - 0.7).abs() < 1e-12);
        assert_eq!(s.samples, 50);
        let far = empirical_conditional_average(&traj, &Band::Interval { sigma: 0.2, eps: 0.01 }, Player::Row).unwrap();
        assert!(far.is_empty() && far.mean().is_none());
    }

    #[test]
    fn matching_pennies_band_average_is_uniform() {
        let g = classic::matching_pennies();
        let x0 = SimplexPoint::new(vec![0.9, 0.1]).unwrap();
        let traj = integrate(&g, &x0, &SimplexPoint::uniform(2), &IntegratorConfig::new(1e-3, 300.0, 1)).unwrap();
        let s = empirical_conditional_average(&traj, &Band::Interval { sigma: 0.6, eps: 0.01 }, Player::Row).unwrap();
        let mean = s.mean().unwrap();
        assert!((mean[0] - 0.5).abs() < 1e-2, "{mean:?}");
    }

    #[test]
    fn prediction_is_the_equilibrium_for_zero_sum() {
        let g = Game::zero_sum(vec![vec![2.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let (_, ystar) = interior_nash_2x2(&g).unwrap().unwrap();
        let x0 = SimplexPoint::new(vec![0.7, 0.3]).unwrap();
        let traj = integrate(&g, &x0, &SimplexPoint::new(vec![0.3, 0.7]).unwrap(), &IntegratorConfig::new(1e-3, 40.0, 10)).unwrap();
        for sigma in [0.3, 0.45, 0.6] {
            let p = predicted_conditional_average(&traj, sigma).unwrap();
            assert!(p.mean.distance_inf(&ystar) < 1e-6, "sigma {sigma}: {:?}", p.mean);
        }
    }

    #[test]
    fn equal_speeds_give_the_midpoint() {
        // Matching Pennies from a symmetric start crosses x1 = 1/2 with equal speeds
        let g = classic::matching_pennies();
        let x0 = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        let y0 = SimplexPoint::new(vec![0.8, 0.2]).unwrap();
        let traj = integrate(&g, &x0, &y0, &IntegratorConfig::new(1e-3, 30.0, 10)).unwrap();
        let p = predicted_conditional_average(&traj, 0.5).unwrap();
        let [c1, c2] = &p.crossings;
        assert!((c1.speed - c2.speed).abs() < 1e-7);
        assert!((p.mean[0] - 0.5 * (c1.nu[0] + c2.nu[0])).abs() < 1e-7);
    }

    #[test]
    fn sigma_outside_orbit_is_refused() {
        let g = classic::matching_pennies();
        let x0 = SimplexPoint::new(vec![0.6, 0.4]).unwrap();
        let traj = integrate(&g, &x0, &SimplexPoint::uniform(2), &IntegratorConfig::new(1e-3, 20.0, 10)).unwrap();
        assert!(matches!(predicted_conditional_average(&traj, 0.9), Err(Error::Refused(_))));
    }
}
