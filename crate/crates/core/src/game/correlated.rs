use super::{Game, JointDistribution};

/// Outcome of an equilibrium test: whether it holds within the tolerance and
/// the largest profitable deviation found (zero or negative when none).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EquilibriumCheck {
    pub holds: bool,
    pub max_violation: f64,
}

fn shape_matches(g: &Game, z: &JointDistribution) {
    assert_eq!(
        (g.n(), g.m()),
        (z.n(), z.m()),
        "joint distribution shape must match the game"
    );
}

/// Largest entry other than `skip`; the entry itself when it is the only one.
fn best_other(v: &[f64], skip: usize) -> f64 {
    v.iter()
        .enumerate()
        .filter(|&(k, _)| k != skip)
        .map(|(_, &x)| x)
        .fold(if v.len() == 1 { v[0] } else { f64::NEG_INFINITY }, f64::max)
}

/// Correlated equilibrium test. Only pure deviations are checked: the
/// deviation gain is linear in the deviating mixed strategy, so its maximum
/// over the simplex sits at a vertex.
pub fn is_ce(g: &Game, z: &JointDistribution, tol: f64) -> EquilibriumCheck {
    shape_matches(g, z);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..g.n() {
        let Some(cond) = z.col_given_row(i) else { continue };
        let u = g.payoff_vector(crate::Player::Row, &cond);
        worst = worst.max(best_other(&u, i) - u[i]);
    }
    for j in 0..g.m() {
        let Some(cond) = z.row_given_col(j) else { continue };
        let w = g.payoff_vector(crate::Player::Col, &cond);
        worst = worst.max(best_other(&w, j) - w[j]);
    }
    EquilibriumCheck {
        holds: worst <= tol,
        max_violation: worst,
    }
}

/// Coarse correlated equilibrium test against all pure unconditional
/// deviations.
pub fn is_cce(g: &Game, z: &JointDistribution, tol: f64) -> EquilibriumCheck {
    shape_matches(g, z);
    let mut row_value = 0.0;
    let mut col_value = 0.0;
    for i in 0..g.n() {
        for j in 0..g.m() {
            row_value += g.a(i, j) * z.get(i, j);
            col_value += g.b(i, j) * z.get(i, j);
        }
    }
    let u = g.payoff_vector(crate::Player::Row, &z.col_marginal());
    let w = g.payoff_vector(crate::Player::Col, &z.row_marginal());
    let row_gain = u.iter().copied().fold(f64::NEG_INFINITY, f64::max) - row_value;
    let col_gain = w.iter().copied().fold(f64::NEG_INFINITY, f64::max) - col_value;
    let worst = row_gain.max(col_gain);
    EquilibriumCheck {
        holds: worst <= tol,
        max_violation: worst,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruns::{build_game, BrunsGameId};
    use crate::game::{classic, SimplexPoint};

    fn five_sixteenths() -> JointDistribution {
        JointDistribution::new(vec![
            vec![5.0 / 16.0, 3.0 / 16.0],
            vec![3.0 / 16.0, 5.0 / 16.0],
        ])
        .unwrap()
    }

    #[test]
    fn nash_product_is_ce_and_cce() {
        let g = classic::matching_pennies();
        let h = SimplexPoint::uniform(2);
        let z = JointDistribution::product(&h, &h);
        let ce = is_ce(&g, &z, 1e-12);
        assert!(ce.holds);
        assert_eq!(ce.max_violation, 0.0);
        assert!(is_cce(&g, &z, 1e-12).holds);
    }

    #[test]
    fn uniform_joint_on_matching_pennies_is_ce() {
        let g = classic::matching_pennies();
        let z = JointDistribution::new(vec![vec![0.25; 2]; 2]).unwrap();
        assert!(is_ce(&g, &z, 0.0).holds);
    }

    #[test]
    fn alternating_mixture_on_coordination_game() {
        let g = classic::diagonal_coordination();
        let z = five_sixteenths();
        let cce = is_cce(&g, &z, 1e-12);
        assert!(cce.holds);
        // realized 10/16 against 1/2 from either fixed action
        assert!((cce.max_violation + 0.125).abs() < 1e-15);
        // Conditioned on its own pure action the opponent matches with
        // probability 5/8, so no pure swap is profitable either.
        let ce = is_ce(&g, &z, 1e-12);
        assert!(ce.holds);
        assert!((ce.max_violation + 0.25).abs() < 1e-15);
    }

    #[test]
    fn non_nash_point_mass_on_pd_is_not_cce() {
        let g = build_game(BrunsGameId::new("Pd", "Pd").unwrap());
        let z = JointDistribution::new(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let cce = is_cce(&g, &z, 1e-12);
        assert!(!cce.holds);
        assert_eq!(cce.max_violation, 1.0);
        assert!(!is_ce(&g, &z, 1e-12).holds);
    }

    #[test]
    fn ce_skips_rows_with_zero_mass() {
        let g = classic::matching_pennies();
        let z = JointDistribution::new(vec![vec![0.5, 0.5], vec![0.0, 0.0]]).unwrap();
        let ce = is_ce(&g, &z, 1e-12);
        assert!(ce.max_violation.is_finite());
    }
}
