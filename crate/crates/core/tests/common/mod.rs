//! Oracles shared by the integration tests, written without the library's
//! sequence-form machinery.

use gameabs::efg::{Actor, GameTree, NodeId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Payoff to the first player of 3-card Kuhn for one deal and pure choices.
/// `p1[c] = (bets at the root, calls after check-bet)`,
/// `p2[c] = (bets after a check, calls a bet)`.
pub fn kuhn_payoff(c1: usize, c2: usize, p1: (bool, bool), p2: (bool, bool)) -> f64 {
    let showdown = |pot: f64| if c1 > c2 { pot } else { -pot };
    match (p1.0, p2.0, p2.1, p1.1) {
        (true, _, true, _) => showdown(2.0),
        (true, _, false, _) => 1.0,
        (false, false, _, _) => showdown(1.0),
        (false, true, _, true) => showdown(2.0),
        (false, true, _, false) => -1.0,
    }
}

pub fn unpack(bits: usize, card: usize) -> (bool, bool) {
    (bits >> (2 * card) & 1 == 1, bits >> (2 * card + 1) & 1 == 1)
}

/// 64 x 64 matrix over pure strategies, averaged over the six deals.
pub fn kuhn3_matrix() -> Vec<Vec<f64>> {
    (0..64)
        .map(|a| {
            (0..64)
                .map(|b| {
                    let mut v = 0.0;
                    for c1 in 0..3 {
                        for c2 in (0..3).filter(|&c| c != c1) {
                            v += kuhn_payoff(c1, c2, unpack(a, c1), unpack(b, c2)) / 6.0;
                        }
                    }
                    v
                })
                .collect()
        })
        .collect()
}

/// Regret-matching+ self-play on a matrix; returns `(lower, upper)` bounds
/// on the game value from the averaged strategies.
pub fn matrix_value_bounds(m: &[Vec<f64>], iterations: usize) -> (f64, f64) {
    let (rows, cols) = (m.len(), m[0].len());
    let (mut rx, mut ry) = (vec![0.0; rows], vec![0.0; cols]);
    let (mut sx, mut sy) = (vec![0.0; rows], vec![0.0; cols]);
    let normalize = |r: &[f64]| {
        let s: f64 = r.iter().sum();
        if s > 0.0 {
            r.iter().map(|v| v / s).collect()
        } else {
            vec![1.0 / r.len() as f64; r.len()]
        }
    };
    for t in 1..=iterations {
        let x: Vec<f64> = normalize(&rx);
        let y: Vec<f64> = normalize(&ry);
        let row_vals: Vec<f64> = (0..rows).map(|i| (0..cols).map(|j| m[i][j] * y[j]).sum()).collect();
        let col_vals: Vec<f64> = (0..cols).map(|j| (0..rows).map(|i| m[i][j] * x[i]).sum()).collect();
        let v: f64 = x.iter().zip(&row_vals).map(|(a, b)| a * b).sum();
        for i in 0..rows {
            rx[i] = f64::max(rx[i] + row_vals[i] - v, 0.0);
            sx[i] += t as f64 * x[i];
        }
        for j in 0..cols {
            ry[j] = f64::max(ry[j] + v - col_vals[j], 0.0);
            sy[j] += t as f64 * y[j];
        }
    }
    let (x, y) = (normalize(&sx), normalize(&sy));
    let lower = (0..cols).map(|j| (0..rows).map(|i| m[i][j] * x[i]).sum::<f64>()).fold(f64::INFINITY, f64::min);
    let upper = (0..rows).map(|i| (0..cols).map(|j| m[i][j] * y[j]).sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
    (lower, upper)
}

/// Expected first-player utility by direct recursion over the tree.
pub fn walk(game: &GameTree, node: NodeId, strategy: &[Vec<f64>]) -> f64 {
    let n = game.node(node);
    match n.actor {
        Actor::Terminal => n.utility,
        Actor::Chance => game.edges(node).iter().map(|e| e.prob * walk(game, e.child, strategy)).sum(),
        Actor::Player(_) => {
            let probs = &strategy[n.infoset().unwrap()];
            game.edges(node).iter().zip(probs).map(|(e, p)| p * walk(game, e.child, strategy)).sum()
        }
    }
}

pub fn random_strategy(game: &GameTree, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    game.infoset_action_counts()
        .iter()
        .map(|&n| {
            // Occasionally pure, to exercise zero-reach subtrees.
            let mut w: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            if rng.random_bool(0.2) {
                let keep = rng.random_range(0..n);
                w.iter_mut().enumerate().for_each(|(i, v)| *v = if i == keep { 1.0 } else { 0.0 });
            }
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .collect()
}
