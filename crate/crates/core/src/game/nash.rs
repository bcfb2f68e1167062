use nalgebra::{DMatrix, DVector};

use super::{dot, Game, Player, SimplexPoint};
use crate::{Error, Result};

/// Payoff ties closer than this are treated as indifference.
pub const TIE_TOL: f64 = 1e-12;

/// Tolerance used to certify a Nash equilibrium against pure deviations.
pub const NASH_CERT_TOL: f64 = 1e-9;

/// Pure strategies of `player` maximizing expected payoff against
/// `opponent`, in increasing index order.
pub fn best_response(g: &Game, player: Player, opponent: &SimplexPoint) -> Vec<usize> {
    assert_eq!(
        opponent.len(),
        g.strategies(player.opponent()),
        "opponent strategy has wrong dimension"
    );
    let payoffs = g.payoff_vector(player, opponent.as_slice());
    let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    payoffs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p >= best - TIE_TOL)
        .map(|(i, _)| i)
        .collect()
}

/// All pure profiles `(i, j)` in which each strategy is a best response to
/// the other.
pub fn pure_nash_set(g: &Game) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..g.n() {
        let row_br = best_response(g, Player::Col, &SimplexPoint::vertex(g.n(), i));
        for j in 0..g.m() {
            if !row_br.contains(&j) {
                continue;
            }
            let col_br = best_response(g, Player::Row, &SimplexPoint::vertex(g.m(), j));
            if col_br.contains(&i) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Largest gain either player can obtain by a pure deviation from `(x, y)`.
/// Zero (up to rounding) exactly at Nash equilibria.
pub fn nash_violation(g: &Game, x: &SimplexPoint, y: &SimplexPoint) -> f64 {
    let u = g.payoff_vector(Player::Row, y.as_slice());
    let w = g.payoff_vector(Player::Col, x.as_slice());
    let row_gain = u.iter().copied().fold(f64::NEG_INFINITY, f64::max) - dot(x.as_slice(), &u);
    let col_gain = w.iter().copied().fold(f64::NEG_INFINITY, f64::max) - dot(y.as_slice(), &w);
    row_gain.max(col_gain)
}

/// Fully mixed equilibrium of a nondegenerate 2x2 game from the two
/// indifference conditions. `Ok(None)` when the candidate leaves `(0, 1)`.
pub fn interior_nash_2x2(g: &Game) -> Result<Option<(SimplexPoint, SimplexPoint)>> {
    if g.n() != 2 || g.m() != 2 {
        return Err(Error::Dimension("interior_nash_2x2 needs a 2x2 game".into()));
    }
    let row_diff = g.a(0, 0) - g.a(0, 1) - g.a(1, 0) + g.a(1, 1);
    let col_diff = g.b(0, 0) - g.b(0, 1) - g.b(1, 0) + g.b(1, 1);
    if row_diff == 0.0 || col_diff == 0.0 {
        return Err(Error::Degenerate("a second payoff difference vanishes".into()));
    }
    let x1 = (g.b(1, 1) - g.b(1, 0)) / col_diff;
    let y1 = (g.a(1, 1) - g.a(0, 1)) / row_diff;
    if !(x1 > 0.0 && x1 < 1.0 && y1 > 0.0 && y1 < 1.0) {
        return Ok(None);
    }
    let x = SimplexPoint::binary(x1)?;
    let y = SimplexPoint::binary(y1)?;
    // both players must be indifferent between their two pure strategies
    let u = g.payoff_vector(Player::Row, y.as_slice());
    let w = g.payoff_vector(Player::Col, x.as_slice());
    let tol = NASH_CERT_TOL * (1.0 + u[0].abs().max(w[0].abs()));
    if (u[0] - u[1]).abs() > tol || (w[0] - w[1]).abs() > tol {
        return Ok(None);
    }
    Ok(Some((x, y)))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// Solve for the mixed strategy supported on `support` that makes the
/// opponent indifferent across `opponent_support`. `payoff(s, o)` is the
/// opponent's payoff when the solved-for player uses `s`.
fn indifference(
    dim: usize,
    support: &[usize],
    opponent_support: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
) -> Option<Vec<f64>> {
    let k = support.len();
    let mut lhs = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut rhs = DVector::<f64>::zeros(k + 1);
    for (r, &o) in opponent_support.iter().enumerate() {
        for (c, &s) in support.iter().enumerate() {
            lhs[(r, c)] = payoff(s, o);
        }
        lhs[(r, k)] = -1.0;
    }
    for c in 0..k {
        lhs[(k, c)] = 1.0;
    }
    rhs[k] = 1.0;
    let sol = lhs.lu().solve(&rhs)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut probs = vec![0.0; dim];
    for (c, &s) in support.iter().enumerate() {
        if sol[c] < -TIE_TOL {
            return None;
        }
        probs[s] = sol[c].max(0.0);
    }
    Some(probs)
}

/// Nash equilibria found by enumerating equal-size support pairs and solving
/// the indifference systems. Each result is certified against all pure
/// deviations. Intended for small games (`n, m <= 4`).
pub fn nash_support_enumeration(g: &Game) -> Result<Vec<(SimplexPoint, SimplexPoint)>> {
    if g.n() > 4 || g.m() > 4 {
        return Err(Error::Input(format!(
            "support enumeration is limited to 4x4 games, got {}x{}",
            g.n(),
            g.m()
        )));
    }
    let mut found: Vec<(SimplexPoint, SimplexPoint)> = Vec::new();
    for k in 1..=g.n().min(g.m()) {
        for rows in subsets(g.n(), k) {
            for cols in subsets(g.m(), k) {
                let Some(x) = indifference(g.n(), &rows, &cols, |i, j| g.b(i, j)) else {
                    continue;
                };
                let Some(y) = indifference(g.m(), &cols, &rows, |j, i| g.a(i, j)) else {
                    continue;
                };
                let (Ok(x), Ok(y)) = (SimplexPoint::normalized(x), SimplexPoint::normalized(y))
                else {
                    continue;
                };
                if nash_violation(g, &x, &y) > NASH_CERT_TOL {
                    continue;
                }
                let dup = found.iter().any(|(fx, fy)| {
                    fx.distance_inf(&x) < NASH_CERT_TOL && fy.distance_inf(&y) < NASH_CERT_TOL
                });
                if !dup {
                    found.push((x, y));
                }
            }
        }
    }
    Ok(found)
}
