//! Ordinal 2x2 basis games and the 144-game suite built from them.
//!
//! Each basis code names a row payoff matrix whose entries are a permutation
//! of `{1, 2, 3, 4}`. The column player of a pairing `R x C` receives the
//! basis matrix of `C` transposed along the anti-diagonal.

use std::fmt;
use std::str::FromStr;

use crate::game::Game;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BrunsCode {
    Ch,
    Ba,
    Hr,
    Cm,
    Dl,
    Pd,
    Sh,
    As,
    Co,
    Pc,
    Ha,
    Nc,
}

impl BrunsCode {
    /// Catalog order; the suite is enumerated row-major over this list.
    pub const ALL: [BrunsCode; 12] = [
        BrunsCode::Ch,
        BrunsCode::Ba,
        BrunsCode::Hr,
        BrunsCode::Cm,
        BrunsCode::Dl,
        BrunsCode::Pd,
        BrunsCode::Sh,
        BrunsCode::As,
        BrunsCode::Co,
        BrunsCode::Pc,
        BrunsCode::Ha,
        BrunsCode::Nc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BrunsCode::Ch => "Ch",
            BrunsCode::Ba => "Ba",
            BrunsCode::Hr => "Hr",
            BrunsCode::Cm => "Cm",
            BrunsCode::Dl => "Dl",
            BrunsCode::Pd => "Pd",
            BrunsCode::Sh => "Sh",
            BrunsCode::As => "As",
            BrunsCode::Co => "Co",
            BrunsCode::Pc => "Pc",
            BrunsCode::Ha => "Ha",
            BrunsCode::Nc => "Nc",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BrunsCode::Ch => "Chicken",
            BrunsCode::Ba => "Battle",
            BrunsCode::Hr => "Hero",
            BrunsCode::Cm => "Compromise",
            BrunsCode::Dl => "Deadlock",
            BrunsCode::Pd => "Prisoner's dilemma",
            BrunsCode::Sh => "Stag hunt",
            BrunsCode::As => "Assurance",
            BrunsCode::Co => "Coordination",
            BrunsCode::Pc => "Peace",
            BrunsCode::Ha => "Harmony",
            BrunsCode::Nc => "Concord",
        }
    }
}

impl fmt::Display for BrunsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BrunsCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BrunsCode::ALL
            .iter()
            .copied()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Input(format!("unknown basis code {s:?}")))
    }
}

/// Row payoffs of a basis game.
pub fn basis_payoffs(code: BrunsCode) -> [[i32; 2]; 2] {
    match code {
        BrunsCode::Ch => [[2, 3], [1, 4]],
        BrunsCode::Ba => [[3, 2], [1, 4]],
        BrunsCode::Hr => [[3, 1], [2, 4]],
        BrunsCode::Cm => [[2, 1], [3, 4]],
        BrunsCode::Dl => [[1, 2], [3, 4]],
        BrunsCode::Pd => [[1, 3], [2, 4]],
        BrunsCode::Sh => [[1, 4], [2, 3]],
        BrunsCode::As => [[1, 4], [3, 2]],
        BrunsCode::Co => [[2, 4], [3, 1]],
        BrunsCode::Pc => [[3, 4], [2, 1]],
        BrunsCode::Ha => [[3, 4], [1, 2]],
        BrunsCode::Nc => [[2, 4], [1, 3]],
    }
}

/// `out[i][j] = m[1 - j][1 - i]`: swaps the main-diagonal entries and fixes
/// the anti-diagonal.
pub fn anti_diagonal_transpose<T: Copy>(m: [[T; 2]; 2]) -> [[T; 2]; 2] {
    let mut out = m;
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = m[1 - j][1 - i];
        }
    }
    out
}

/// A pairing of a row basis with a column basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BrunsGameId {
    pub row: BrunsCode,
    pub col: BrunsCode,
}

impl BrunsGameId {
    pub fn new(row: &str, col: &str) -> Result<Self> {
        Ok(BrunsGameId {
            row: row.parse()?,
            col: col.parse()?,
        })
    }

    /// Position in the enumeration order.
    pub fn index(self) -> usize {
        let pos = |c| BrunsCode::ALL.iter().position(|&x| x == c).expect("listed code");
        pos(self.row) * BrunsCode::ALL.len() + pos(self.col)
    }
}

impl fmt::Display for BrunsGameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.row, self.col)
    }
}

impl FromStr for BrunsGameId {
    type Err = Error;

    /// Accepts `RowxCol` (as printed), `Row-Col` or `Row×Col`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['x', '-', '×']).collect();
        match parts.as_slice() {
            [r, c] => BrunsGameId::new(r, c),
            _ => Err(Error::Input(format!("malformed game id {s:?}"))),
        }
    }
}

fn to_rows(m: [[i32; 2]; 2]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect()
}

pub fn build_game(id: BrunsGameId) -> Game {
    let row = basis_payoffs(id.row);
    let col = anti_diagonal_transpose(basis_payoffs(id.col));
    Game::new(to_rows(row), to_rows(col)).expect("basis matrices are valid 2x2 games")
}

/// All 144 pairings in row-major catalog order.
pub fn enumerate_144() -> Vec<(BrunsGameId, Game)> {
    BrunsCode::ALL
        .iter()
        .flat_map(|&row| BrunsCode::ALL.iter().map(move |&col| BrunsGameId { row, col }))
        .map(|id| (id, build_game(id)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{classify_case, genericity_check, CaseClass};
    use proptest::prelude::*;

    #[test]
    fn basis_matrices_match_catalog() {
        assert_eq!(basis_payoffs("Ch".parse().unwrap()), [[2, 3], [1, 4]]);
        assert_eq!(basis_payoffs("Sh".parse().unwrap()), [[1, 4], [2, 3]]);
        assert_eq!(basis_payoffs("Nc".parse().unwrap()), [[2, 4], [1, 3]]);
        assert!("Zz".parse::<BrunsCode>().is_err());
    }

    #[test]
    fn every_basis_is_a_permutation_of_one_to_four() {
        for code in BrunsCode::ALL {
            let mut v: Vec<i32> = basis_payoffs(code).iter().flatten().copied().collect();
            v.sort();
            assert_eq!(v, vec![1, 2, 3, 4], "{code}");
        }
    }

    #[test]
    fn anti_transpose_examples() {
        assert_eq!(anti_diagonal_transpose([[2, 3], [1, 4]]), [[4, 3], [1, 2]]);
        assert_eq!(anti_diagonal_transpose([[7, 5], [6, 7]]), [[7, 5], [6, 7]]);
    }

    proptest! {
        #[test]
        fn anti_transpose_is_an_involution(a in -100i32..100, b in -100i32..100, c in -100i32..100, d in -100i32..100) {
            let m = [[a, b], [c, d]];
            prop_assert_eq!(anti_diagonal_transpose(anti_diagonal_transpose(m)), m);
        }
    }

    #[test]
    fn chicken_pairing() {
        let g = build_game(BrunsGameId::new("Ch", "Ch").unwrap());
        assert_eq!(g.row_payoff(), vec![vec![2.0, 3.0], vec![1.0, 4.0]]);
        assert_eq!(g.col_payoff(), vec![vec![4.0, 3.0], vec![1.0, 2.0]]);
    }

    #[test]
    fn suite_shape() {
        let suite = enumerate_144();
        assert_eq!(suite.len(), 144);
        assert_eq!(suite[0].0.to_string(), "ChxCh");
        assert_eq!(suite.iter().filter(|(id, _)| id.row == id.col).count(), 12);
        let ba_as = BrunsGameId::new("Ba", "As").unwrap();
        assert!(suite.iter().any(|(id, _)| *id == ba_as));
        for (k, (id, g)) in suite.iter().enumerate() {
            assert_eq!(id.index(), k);
            assert_eq!(id.to_string().parse::<BrunsGameId>().unwrap(), *id);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((1.0..=4.0).contains(&g.a(i, j)) && (1.0..=4.0).contains(&g.b(i, j)));
                }
            }
            // distinct entries give unique best responses everywhere
            assert!(genericity_check(g).unwrap().unique_best_responses);
        }
    }

    #[test]
    fn case_one_games_are_the_cyclic_pairings() {
        let case_one: Vec<String> = enumerate_144()
            .into_iter()
            .filter(|(_, g)| classify_case(g) == CaseClass::CaseINoPureNe)
            .map(|(id, _)| id.to_string())
            .collect();
        assert_eq!(case_one.len(), 18);
        assert!(case_one.contains(&"BaxAs".to_string()));
    }
}
