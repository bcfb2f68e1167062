use super::{pure_nash_set, Game};
use crate::{Error, Result};

/// Genericity flags of a 2x2 game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenericityReport {
    /// Against every pure opponent strategy each player has a single best reply.
    pub unique_best_responses: bool,
    /// `a11 - a12 - a21 + a22 != 0`
    pub row_nondegenerate: bool,
    /// `b11 - b12 - b21 + b22 != 0`
    pub col_nondegenerate: bool,
    pub generic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum CaseClass {
    /// No pure equilibrium; a unique interior equilibrium around which
    /// interior orbits cycle.
    CaseINoPureNe,
    /// Unique pure equilibrium; strictly dominance solvable.
    CaseIIUniquePureNe,
    /// Two pure equilibria plus an isolated interior one.
    CaseIIITwoPureNe,
    NonGeneric,
}

impl CaseClass {
    pub fn label(self) -> &'static str {
        match self {
            CaseClass::CaseINoPureNe => "I",
            CaseClass::CaseIIUniquePureNe => "II",
            CaseClass::CaseIIITwoPureNe => "III",
            CaseClass::NonGeneric => "non-generic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescaleKind {
    RescaledZeroSum,
    RescaledCoordination,
}

/// `(A, B) ~ (C, cC)`: entrywise `a_ij = C_ij + v_j / c` and
/// `b_ij = c C_ij - u_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaleDecomposition {
    pub scale: f64,
    pub core: [[f64; 2]; 2],
    /// `u_i`, one per row; subtracted from the column player's payoffs.
    pub row_offsets: [f64; 2],
    /// `v_j`, one per column; added (divided by `c`) to the row player's payoffs.
    pub col_offsets: [f64; 2],
    pub kind: RescaleKind,
}

impl RescaleDecomposition {
    /// Rebuild `(A, B)` from the decomposition.
    pub fn reconstruct(&self) -> Game {
        let c = self.scale;
        let a = (0..2)
            .map(|i| (0..2).map(|j| self.core[i][j] + self.col_offsets[j] / c).collect())
            .collect();
        let b = (0..2)
            .map(|i| (0..2).map(|j| c * self.core[i][j] - self.row_offsets[i]).collect())
            .collect();
        Game::new(a, b).expect("reconstruction of a valid decomposition")
    }

    /// The equivalent game `(C, cC)`.
    pub fn rescaled_game(&self) -> Game {
        let c: Vec<Vec<f64>> = self.core.iter().map(|r| r.to_vec()).collect();
        let cc = c.iter().map(|r| r.iter().map(|v| self.scale * v).collect()).collect();
        Game::new(c, cc).expect("finite core")
    }

    /// Largest entrywise gap between `g` and the reconstruction.
    pub fn reconstruction_error(&self, g: &Game) -> f64 {
        let r = self.reconstruct();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((r.a(i, j) - g.a(i, j)).abs());
                worst = worst.max((r.b(i, j) - g.b(i, j)).abs());
            }
        }
        worst
    }
}

fn require_2x2(g: &Game) -> Result<()> {
    if g.n() != 2 || g.m() != 2 {
        return Err(Error::Dimension(format!("expected a 2x2 game, got {}x{}", g.n(), g.m())));
    }
    Ok(())
}

fn second_differences(g: &Game) -> (f64, f64) {
    (
        g.a(0, 0) - g.a(0, 1) - g.a(1, 0) + g.a(1, 1),
        g.b(0, 0) - g.b(0, 1) - g.b(1, 0) + g.b(1, 1),
    )
}

pub fn genericity_check(g: &Game) -> Result<GenericityReport> {
    require_2x2(g)?;
    // exact comparisons: the suites use small integer payoffs
    let unique_best_responses = (0..2).all(|j| g.a(0, j) != g.a(1, j))
        && (0..2).all(|i| g.b(i, 0) != g.b(i, 1));
    let (row_diff, col_diff) = second_differences(g);
    let row_nondegenerate = row_diff != 0.0;
    let col_nondegenerate = col_diff != 0.0;
    Ok(GenericityReport {
        unique_best_responses,
        row_nondegenerate,
        col_nondegenerate,
        generic: unique_best_responses && row_nondegenerate && col_nondegenerate,
    })
}

/// Write a nondegenerate 2x2 game as a rescaled zero-sum (`c < 0`) or
/// rescaled coordination (`c > 0`) game.
pub fn rescale_decompose(g: &Game) -> Result<RescaleDecomposition> {
    require_2x2(g)?;
    let (row_diff, col_diff) = second_differences(g);
    if row_diff == 0.0 || col_diff == 0.0 {
        return Err(Error::Degenerate(
            "rescaling needs both second payoff differences nonzero".into(),
        ));
    }
    let c = col_diff / row_diff;
    // D = cA - B has zero second difference, so d_ij = u_i + v_j
    let d = |i: usize, j: usize| c * g.a(i, j) - g.b(i, j);
    let u = [d(0, 1), d(1, 1)];
    let v = [d(1, 0) - d(1, 1), 0.0];
    let mut core = [[0.0; 2]; 2];
    for (i, row) in core.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = g.a(i, j) - v[j] / c;
        }
    }
    Ok(RescaleDecomposition {
        scale: c,
        core,
        row_offsets: u,
        col_offsets: v,
        kind: if c < 0.0 {
            RescaleKind::RescaledZeroSum
        } else {
            RescaleKind::RescaledCoordination
        },
    })
}

/// Case of a 2x2 game by its number of pure equilibria; `NonGeneric` for
/// anything that fails the genericity conditions (including non-2x2 games).
pub fn classify_case(g: &Game) -> CaseClass {
    match genericity_check(g) {
        Ok(r) if r.generic => {}
        _ => return CaseClass::NonGeneric,
    }
    match pure_nash_set(g).len() {
        0 => CaseClass::CaseINoPureNe,
        1 => CaseClass::CaseIIUniquePureNe,
        2 => CaseClass::CaseIIITwoPureNe,
        k => panic!("generic 2x2 game with {k} pure equilibria"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruns::{basis_payoffs, build_game, BrunsCode, BrunsGameId};
    use crate::game::{classic, interior_nash_2x2};

    fn row_only(code: &str) -> Game {
        let m = basis_payoffs(code.parse::<BrunsCode>().unwrap());
        let rows: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        Game::identical_interest(rows).unwrap()
    }

    #[test]
    fn second_difference_flags_from_basis_matrices() {
        assert!(genericity_check(&row_only("Ch")).unwrap().row_nondegenerate);
        assert!(!genericity_check(&row_only("Dl")).unwrap().row_nondegenerate);
        assert!(!genericity_check(&row_only("Pd")).unwrap().row_nondegenerate);
        let r = genericity_check(&row_only("Pd")).unwrap();
        assert!(!r.generic);
        assert!(genericity_check(&classic::rps_a1()).is_err());
    }

    #[test]
    fn zero_sum_decomposes_to_itself() {
        let g = Game::zero_sum(vec![vec![3.0, -1.0], vec![0.5, 2.0]]).unwrap();
        let d = rescale_decompose(&g).unwrap();
        assert_eq!(d.scale, -1.0);
        assert_eq!(d.kind, RescaleKind::RescaledZeroSum);
        assert_eq!(d.row_offsets, [0.0, 0.0]);
        assert_eq!(d.col_offsets, [0.0, 0.0]);
        assert_eq!(d.core, [[3.0, -1.0], [0.5, 2.0]]);
    }

    #[test]
    fn identical_interest_is_rescaled_coordination() {
        let d = rescale_decompose(&classic::diagonal_coordination()).unwrap();
        assert_eq!(d.scale, 1.0);
        assert_eq!(d.kind, RescaleKind::RescaledCoordination);
    }

    #[test]
    fn chicken_decomposition_reconstructs() {
        let g = build_game(BrunsGameId::new("Ch", "Ch").unwrap());
        let d = rescale_decompose(&g).unwrap();
        assert!(d.reconstruction_error(&g) < 1e-9);
        // (C, cC) shares the interior equilibrium of g
        let (x, y) = interior_nash_2x2(&g).unwrap().unwrap();
        let (xc, yc) = interior_nash_2x2(&d.rescaled_game()).unwrap().unwrap();
        assert!(x.distance_inf(&xc) < 1e-12 && y.distance_inf(&yc) < 1e-12);
    }

    #[test]
    fn degenerate_games_are_refused() {
        let g = build_game(BrunsGameId::new("Pd", "Ch").unwrap());
        assert!(matches!(rescale_decompose(&g), Err(Error::Degenerate(_))));
        assert_eq!(classify_case(&g), CaseClass::NonGeneric);
    }

    #[test]
    fn case_classification_examples() {
        assert_eq!(classify_case(&classic::matching_pennies()), CaseClass::CaseINoPureNe);
        // Cm: row 2 strictly dominates with nonzero second difference
        let g = build_game(BrunsGameId::new("Cm", "Cm").unwrap());
        assert_eq!(classify_case(&g), CaseClass::CaseIIUniquePureNe);
        let g = build_game(BrunsGameId::new("Ch", "Ch").unwrap());
        assert_eq!(classify_case(&g), CaseClass::CaseIIITwoPureNe);
        let g = build_game(BrunsGameId::new("Ba", "As").unwrap());
        assert_eq!(classify_case(&g), CaseClass::CaseINoPureNe);
    }

    proptest::proptest! {
        #[test]
        fn reconstruction_round_trip(vals in proptest::collection::vec(-10i32..=10, 8)) {
            let f = |k: usize| vals[k] as f64;
            let g = Game::new(vec![vec![f(0), f(1)], vec![f(2), f(3)]],
                              vec![vec![f(4), f(5)], vec![f(6), f(7)]]).unwrap();
            if let Ok(d) = rescale_decompose(&g) {
                proptest::prop_assert!(d.reconstruction_error(&g) < 1e-9);
                if let Some((x, y)) = interior_nash_2x2(&g).unwrap() {
                    let (xc, yc) = interior_nash_2x2(&d.rescaled_game()).unwrap().unwrap();
                    proptest::prop_assert!(x.distance_inf(&xc) < 1e-9);
                    proptest::prop_assert!(y.distance_inf(&yc) < 1e-9);
                }
            }
        }
    }
}
