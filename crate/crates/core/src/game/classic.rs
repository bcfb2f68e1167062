//! Small named games used throughout the experiments and tests.

use super::Game;

/// `A = [[1, -1], [-1, 1]]`, `B = -A`.
pub fn matching_pennies() -> Game {
    Game::zero_sum(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).expect("valid game")
}

/// Both players receive 1 when they pick the same strategy and 0 otherwise.
pub fn diagonal_coordination() -> Game {
    Game::identical_interest(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).expect("valid game")
}

/// Rock-paper-scissors.
pub fn rps_a1() -> Game {
    Game::zero_sum(vec![
        vec![0.0, -1.0, 1.0],
        vec![1.0, 0.0, -1.0],
        vec![-1.0, 1.0, 0.0],
    ])
    .expect("valid game")
}

/// Rock-paper-scissors with symmetrically biased payoffs; equilibrium
/// `(1/4, 1/2, 1/4)` for both players.
pub fn rps_a2() -> Game {
    Game::zero_sum(vec![
        vec![0.0, -1.0, 2.0],
        vec![1.0, 0.0, -1.0],
        vec![-2.0, 1.0, 0.0],
    ])
    .expect("valid game")
}

/// Asymmetric rock-paper-scissors variant with distinct equilibria per player.
pub fn rps_a3() -> Game {
    Game::zero_sum(vec![
        vec![1.0, -1.0, 1.2],
        vec![1.0, 0.0, -1.0],
        vec![-1.0, 1.0, -0.5],
    ])
    .expect("valid game")
}
