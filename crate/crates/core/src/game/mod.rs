//! Two-player normal-form games and their equilibria.

pub mod classic;
mod correlated;
mod nash;
mod rescale;

pub use correlated::{is_cce, is_ce, EquilibriumCheck};
pub use nash::{
    best_response, interior_nash_2x2, nash_support_enumeration, nash_violation, pure_nash_set,
};
pub use rescale::{
    classify_case, genericity_check, rescale_decompose, CaseClass, GenericityReport,
    RescaleDecomposition, RescaleKind,
};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance on the sum of a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Default floor below which a coordinate no longer counts as interior.
pub const DEFAULT_INTERIOR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Row,
    Col,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Row => Player::Col,
            Player::Col => Player::Row,
        }
    }
}

/// Bimatrix game `(A, B)`: the row player receives `A[i][j]`, the column
/// player `B[i][j]` when row plays `i` and column plays `j`.
///
/// Payoffs are stored row-major. Both matrices are `n x m` with `n, m >= 2`
/// and finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameSpec", into = "GameSpec")]
pub struct Game {
    n: usize,
    m: usize,
    row: Vec<f64>,
    col: Vec<f64>,
}

/// On-disk layout of a game: `{"row_payoff": [[..]], "col_payoff": [[..]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub row_payoff: Vec<Vec<f64>>,
    pub col_payoff: Vec<Vec<f64>>,
}

impl TryFrom<GameSpec> for Game {
    type Error = Error;

    fn try_from(spec: GameSpec) -> Result<Self> {
        Game::new(spec.row_payoff, spec.col_payoff)
    }
}

impl From<Game> for GameSpec {
    fn from(g: Game) -> Self {
        GameSpec {
            row_payoff: g.row_payoff(),
            col_payoff: g.col_payoff(),
        }
    }
}

fn flatten(name: &str, rows: &[Vec<f64>]) -> Result<(usize, usize, Vec<f64>)> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidGame(format!("{name} is ragged")));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if let Some(v) = flat.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidGame(format!("{name} has non-finite entry {v}")));
    }
    Ok((n, m, flat))
}

impl Game {
    pub fn new(row_payoff: Vec<Vec<f64>>, col_payoff: Vec<Vec<f64>>) -> Result<Self> {
        let (n, m, row) = flatten("row_payoff", &row_payoff)?;
        let (n2, m2, col) = flatten("col_payoff", &col_payoff)?;
        if (n, m) != (n2, m2) {
            return Err(Error::InvalidGame(format!(
                "row_payoff is {n}x{m} but col_payoff is {n2}x{m2}"
            )));
        }
        if n < 2 || m < 2 {
            return Err(Error::InvalidGame(format!(
                "each player needs at least two strategies, got {n}x{m}"
            )));
        }
        Ok(Game { n, m, row, col })
    }

    /// Zero-sum game with `B = -A`.
    pub fn zero_sum(row_payoff: Vec<Vec<f64>>) -> Result<Self> {
        let col = row_payoff
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        Game::new(row_payoff, col)
    }

    /// Identical-interest game with `B = A`.
    pub fn identical_interest(payoff: Vec<Vec<f64>>) -> Result<Self> {
        Game::new(payoff.clone(), payoff)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game serialization is infallible")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of pure strategies of `player`.
    pub fn strategies(&self, player: Player) -> usize {
        match player {
            Player::Row => self.n,
            Player::Col => self.m,
        }
    }

    #[inline]
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.row[i * self.m + j]
    }

    #[inline]
    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.col[i * self.m + j]
    }

    pub fn row_payoff(&self) -> Vec<Vec<f64>> {
        self.row.chunks(self.m).map(<[f64]>::to_vec).collect()
    }

    pub fn col_payoff(&self) -> Vec<Vec<f64>> {
        self.col.chunks(self.m).map(<[f64]>::to_vec).collect()
    }

    /// Row utility vector `A y`.
    #[inline]
    pub fn row_utilities_into(&self, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.row[i * self.m..(i + 1) * self.m];
            *o = r.iter().zip(y).map(|(a, y)| a * y).sum();
        }
    }

    /// Column utility vector `B^T x`, i.e. `(x^T B)_j`.
    #[inline]
    pub fn col_utilities_into(&self, x: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..self.n).map(|i| x[i] * self.col[i * self.m + j]).sum();
        }
    }

    /// Expected payoff of each pure strategy of `player` against the mixed
    /// strategy `opponent`.
    pub fn payoff_vector(&self, player: Player, opponent: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.strategies(player)];
        match player {
            Player::Row => self.row_utilities_into(opponent, &mut out),
            Player::Col => self.col_utilities_into(opponent, &mut out),
        }
        out
    }

    fn check_dims(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.n || y.len() != self.m {
            return Err(Error::Dimension(format!(
                "game is {}x{} but strategies have lengths {} and {}",
                self.n,
                self.m,
                x.len(),
                y.len()
            )));
        }
        Ok(())
    }

    /// Shift every column of `A` by `col_shift[j]` and every row of `B` by
    /// `row_shift[i]`. The result is equivalent to `self` under the
    /// replicator dynamics.
    pub fn shifted(&self, col_shift: &[f64], row_shift: &[f64]) -> Result<Game> {
        if col_shift.len() != self.m || row_shift.len() != self.n {
            return Err(Error::Dimension("shift vector lengths".into()));
        }
        let mut g = self.clone();
        for i in 0..self.n {
            for j in 0..self.m {
                g.row[i * self.m + j] += col_shift[j];
                g.col[i * self.m + j] += row_shift[i];
            }
        }
        Ok(g)
    }
}

/// Expected utilities `(x^T A y, x^T B y)`.
pub fn utilities(g: &Game, x: &SimplexPoint, y: &SimplexPoint) -> Result<(f64, f64)> {
    g.check_dims(x.as_slice(), y.as_slice())?;
    let mut u = vec![0.0; g.n];
    g.row_utilities_into(y.as_slice(), &mut u);
    let row = dot(x.as_slice(), &u);
    let mut w = vec![0.0; g.m];
    g.col_utilities_into(x.as_slice(), &mut w);
    let col = dot(y.as_slice(), &w);
    Ok((row, col))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// A mixed strategy: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint(Vec<f64>);

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        SimplexPoint::new(v)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

impl SimplexPoint {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::NotSimplex("empty vector".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::NotSimplex(format!("{probs:?} has a negative entry")));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotSimplex(format!("{probs:?} sums to {s}")));
        }
        Ok(SimplexPoint(probs))
    }

    /// Divide by the sum. Fails on negative entries or zero mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if !(s > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::NotSimplex(format!("cannot normalize {weights:?}")));
        }
        Ok(SimplexPoint(weights.into_iter().map(|w| w / s).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        SimplexPoint(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        SimplexPoint(v)
    }

    /// Two-strategy point `(p, 1 - p)`.
    pub fn binary(p: f64) -> Result<Self> {
        SimplexPoint::new(vec![p, 1.0 - p])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_interior(&self, floor: f64) -> bool {
        self.0.iter().all(|&p| p >= floor)
    }

    pub fn distance_inf(&self, other: &SimplexPoint) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for SimplexPoint {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Correlated distribution `z` over joint pure profiles, row-major `n x m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    n: usize,
    m: usize,
    z: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let (n, m, z) = flatten("joint distribution", &rows)
            .map_err(|e| Error::NotSimplex(e.to_string()))?;
        if z.iter().any(|p| *p < 0.0) {
            return Err(Error::NotSimplex("negative joint probability".into()));
        }
        let s: f64 = z.iter().sum();
        if (s - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotSimplex(format!("joint distribution sums to {s}")));
        }
        Ok(JointDistribution { n, m, z })
    }

    /// Product distribution `x y^T`.
    pub fn product(x: &SimplexPoint, y: &SimplexPoint) -> Self {
        let z = x
            .as_slice()
            .iter()
            .flat_map(|a| y.as_slice().iter().map(move |b| a * b))
            .collect();
        JointDistribution {
            n: x.len(),
            m: y.len(),
            z,
        }
    }

    /// Weighted mixture of product distributions; weights need not be
    /// normalized.
    pub fn mixture(parts: &[(f64, JointDistribution)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Input("empty mixture".into()))?;
        let (n, m) = (first.1.n, first.1.m);
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        let mut z = vec![0.0; n * m];
        for (w, d) in parts {
            if (d.n, d.m) != (n, m) {
                return Err(Error::Dimension("mixture components differ in shape".into()));
            }
            for (acc, v) in z.iter_mut().zip(&d.z) {
                *acc += w / total * v;
            }
        }
        Ok(JointDistribution { n, m, z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.z[i * self.m + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.z.chunks(self.m).map(<[f64]>::to_vec).collect()
    }

    /// `z(1|.)`
    pub fn row_marginal(&self) -> Vec<f64> {
        self.z.chunks(self.m).map(|r| r.iter().sum()).collect()
    }

    /// `z(2|.)`
    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.m)
            .map(|j| (0..self.n).map(|i| self.get(i, j)).sum())
            .collect()
    }

    /// `z(2|i)`, or `None` when row `i` has zero mass.
    pub fn col_given_row(&self, i: usize) -> Option<Vec<f64>> {
        let r = &self.z[i * self.m..(i + 1) * self.m];
        let s: f64 = r.iter().sum();
        (s > 0.0).then(|| r.iter().map(|v| v / s).collect())
    }

    /// `z(1|j)`, or `None` when column `j` has zero mass.
    pub fn row_given_col(&self, j: usize) -> Option<Vec<f64>> {
        let c: Vec<f64> = (0..self.n).map(|i| self.get(i, j)).collect();
        let s: f64 = c.iter().sum();
        (s > 0.0).then(|| c.iter().map(|v| v / s).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use classic::matching_pennies;

    #[test]
    fn matching_pennies_value_is_zero() {
        let g = matching_pennies();
        let h = SimplexPoint::uniform(2);
        assert_eq!(utilities(&g, &h, &h).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn chicken_row_utility_at_vertex() {
        let g = Game::new(
            vec![vec![2.0, 3.0], vec![1.0, 4.0]],
            vec![vec![4.0, 3.0], vec![1.0, 2.0]],
        )
        .unwrap();
        let (u, _) = utilities(&g, &SimplexPoint::vertex(2, 0), &SimplexPoint::vertex(2, 1)).unwrap();
        assert_eq!(u, 3.0);
    }

    #[test]
    fn vertex_profiles_select_entries() {
        let g = Game::new(
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
            vec![vec![-1.0, -2.0, -3.0], vec![7.0, 8.0, 9.0]],
        )
        .unwrap();
        for i in 0..2 {
            for j in 0..3 {
                let (u, v) =
                    utilities(&g, &SimplexPoint::vertex(2, i), &SimplexPoint::vertex(3, j)).unwrap();
                assert_eq!((u, v), (g.a(i, j), g.b(i, j)));
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = matching_pennies();
        let err = utilities(&g, &SimplexPoint::uniform(3), &SimplexPoint::uniform(2));
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn invalid_games_are_rejected() {
        assert!(Game::new(vec![vec![1.0]], vec![vec![1.0]]).is_err());
        assert!(Game::new(vec![vec![1.0, 2.0], vec![3.0]], vec![vec![1.0, 2.0], vec![3.0, 4.0]]).is_err());
        assert!(Game::new(
            vec![vec![1.0, f64::NAN], vec![3.0, 4.0]],
            vec![vec![1.0, 2.0], vec![3.0, 4.0]]
        )
        .is_err());
        assert!(Game::new(
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            vec![vec![1.0, 2.0, 0.0], vec![3.0, 4.0, 0.0]]
        )
        .is_err());
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{"row_payoff": [[1, -1], [-1, 1]], "col_payoff": [[-1, 1], [1, -1]]}"#;
        let g = Game::from_json(text).unwrap();
        assert_eq!(g, matching_pennies());
        assert_eq!(Game::from_json(&g.to_json()).unwrap(), g);
        assert!(Game::from_json(r#"{"row_payoff": [[1,2],[3,4]], "col_payoff": [[1,2],[3,4]], "x": 1}"#).is_err());
    }

    #[test]
    fn simplex_point_contract() {
        assert!(SimplexPoint::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexPoint::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexPoint::new(vec![1.5, -0.5]).is_err());
        let p = SimplexPoint::new(vec![1e-10, 1.0 - 1e-10]).unwrap();
        assert!(!p.is_interior(DEFAULT_INTERIOR_FLOOR));
        assert!(SimplexPoint::uniform(3).is_interior(DEFAULT_INTERIOR_FLOOR));
    }

    #[test]
    fn joint_marginals_and_conditionals() {
        let z = JointDistribution::new(vec![vec![0.1, 0.3], vec![0.0, 0.6]]).unwrap();
        assert_eq!(z.row_marginal(), vec![0.4, 0.6]);
        let c = z.col_marginal();
        assert!((c[0] - 0.1).abs() < 1e-15 && (c[1] - 0.9).abs() < 1e-15);
        let cond = z.col_given_row(0).unwrap();
        assert!((cond[0] - 0.25).abs() < 1e-15);
        assert_eq!(z.row_given_col(0).unwrap(), vec![1.0, 0.0]);
        let empty = JointDistribution::new(vec![vec![0.5, 0.5], vec![0.0, 0.0]]).unwrap();
        assert!(empty.col_given_row(1).is_none());
    }
}
