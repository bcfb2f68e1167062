//! Fast self-check of the numerical invariants, run by `phireg verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bruns::enumerate_144;
use crate::dynamics::{detect_period, integrate, rd_vector_field, IntegratorConfig, KlInvariant};
use crate::game::{classic, classify_case, is_cce, CaseClass, Game, Player, SimplexPoint};
use crate::regret::{
    accumulate, cce_alternating_process, empirical_conditional_average, external_regret, internal_regret,
    mosaic_regret, swap_regret, swap_value, AlternatingProcess, Band, Partition,
};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Check { name, passed, detail }
    }
}

fn random_game(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Game {
    let mut mat = || (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect();
    let a = mat();
    let b = mat();
    Game::new(a, b).expect("finite entries")
}

fn catalog() -> Check {
    let games = enumerate_144();
    let case_one = games.iter().filter(|(_, g)| classify_case(g) == CaseClass::CaseINoPureNe).count();
    Check::new(
        "bruns catalog",
        games.len() == 144 && case_one == 18,
        format!("{} games, {case_one} in Case I", games.len()),
    )
}

fn rest_point() -> Check {
    let h = SimplexPoint::uniform(2);
    let (dx, dy) = rd_vector_field(&classic::matching_pennies(), &h, &h);
    let speed = dx.iter().chain(&dy).fold(0.0f64, |a, v| a.max(v.abs()));
    Check::new("equilibrium is a rest point", speed == 0.0, format!("|F| = {speed:e}"))
}

fn conservation() -> Result<Check> {
    let g = classic::matching_pennies();
    let traj = integrate(&g, &SimplexPoint::binary(0.8)?, &SimplexPoint::binary(0.3)?, &IntegratorConfig::new(1e-3, 20.0, 10))?;
    let series = KlInvariant::new(&g)?.series(&traj);
    let drift = series.drift(traj.len());
    Ok(Check::new("KL invariant conserved", drift < 1e-9, format!("drift {drift:.2e} over T = 20")))
}

fn period() -> Result<Check> {
    let g = classic::matching_pennies();
    let traj = integrate(&g, &SimplexPoint::binary(0.51)?, &SimplexPoint::uniform(2), &IntegratorConfig::new(1e-3, 15.0, 10))?;
    let p = detect_period(&traj, 1e-4);
    let tau = std::f64::consts::TAU;
    let ok = p.is_some_and(|p| (p - tau).abs() < 1e-3);
    Ok(Check::new("small orbit has period 2 pi", ok, format!("period {p:?}")))
}

fn hierarchy() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = IntegratorConfig::new(1e-2, 20.0, 1);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut singleton_gap: f64 = 0.0;
    for _ in 0..20 {
        let g = random_game(&mut rng, 2, 2);
        let x0 = SimplexPoint::binary(rng.random_range(0.05..0.95))?;
        let y0 = SimplexPoint::binary(rng.random_range(0.05..0.95))?;
        let traj = integrate(&g, &x0, &y0, &cfg)?;
        let acc = accumulate(&traj, &Partition::intervals(10), Player::Row)?;
        let (e, i, s, m) = (external_regret(&acc), internal_regret(&acc), swap_regret(&acc), mosaic_regret(&acc));
        worst = worst.max(e - i).max(i - s).max(s - m);
        let single = accumulate(&traj, &Partition::Singleton, Player::Row)?;
        singleton_gap = singleton_gap.max((mosaic_regret(&single) - swap_regret(&single)).abs());
    }
    Ok(Check::new(
        "external <= internal <= swap <= mosaic",
        worst <= 1e-9 && singleton_gap == 0.0,
        format!("largest inversion {worst:.2e}, singleton gap {singleton_gap:e}"),
    ))
}

fn swap_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    for _ in 0..100 {
        let s: Vec<Vec<f64>> = (0..3).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let mut best = f64::NEG_INFINITY;
        for code in 0..27 {
            let v = s[0][code % 3] + s[1][(code / 3) % 3] + s[2][code / 9];
            best = best.max(v);
        }
        if swap_value(&s) != best {
            mismatches += 1;
        }
    }
    Check::new("swap value matches enumeration", mismatches == 0, format!("{mismatches} mismatches in 100"))
}

fn alternating() -> Result<Check> {
    let p = cce_alternating_process(1.0, 40.0)?;
    let z = p.empirical_joint(p.epochs);
    let cce = is_cce(&p.game(), &z, 1e-9);
    let (ext, mos) = AlternatingProcess::slopes(&p.regret_series(&Partition::intervals(2))?);
    Ok(Check::new(
        "alternating process separates external from mosaic",
        cce.holds && ext < 1e-3 && mos > 0.05,
        format!("CCE violation {:.3}, slopes {ext:.3} / {mos:.3}", cce.max_violation),
    ))
}

fn symmetry() -> Result<Check> {
    let x = SimplexPoint::new(vec![0.5, 0.3, 0.2])?;
    let traj = integrate(&classic::rps_a1(), &x, &x, &IntegratorConfig::new(1e-3, 20.0, 10))?;
    let gap = (0..traj.len())
        .map(|k| traj.x(k).iter().zip(traj.y(k)).fold(0.0f64, |a, (p, q)| a.max((p - q).abs())))
        .fold(0.0, f64::max);
    Ok(Check::new("symmetric start stays symmetric", gap == 0.0, format!("max |x - y| = {gap:e}")))
}

fn band_average() -> Result<Check> {
    let g = classic::matching_pennies();
    let traj = integrate(&g, &SimplexPoint::binary(0.9)?, &SimplexPoint::uniform(2), &IntegratorConfig::new(1e-3, 300.0, 1))?;
    let s = empirical_conditional_average(&traj, &Band::Interval { sigma: 0.6, eps: 0.01 }, Player::Row)?;
    let err = s.mean().map_or(f64::INFINITY, |m| (m[0] - 0.5).abs());
    Ok(Check::new("band average is the opponent equilibrium", err < 1e-2, format!("error {err:.2e}")))
}

/// Run every check; stops early only on an unexpected error.
pub fn run_invariant_suite() -> Result<Vec<Check>> {
    Ok(vec![
        catalog(),
        rest_point(),
        conservation()?,
        period()?,
        hierarchy()?,
        swap_oracle(),
        alternating()?,
        symmetry()?,
        band_average()?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for c in run_invariant_suite().unwrap() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
