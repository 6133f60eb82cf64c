//! Checks against oracles written independently of the library: a direct
//! Kuhn rules evaluator, pure-strategy enumeration and a plain tree walk.

use gameabs::efg::{
    build_utility_matrix, expected_utility, index_sequences, size_metrics, validate_game, Actor, GameTree, Player,
};
use gameabs::games::{build_kuhn, build_leduc, matching_pennies, GameSpec, KuhnSpec, LeducSpec};
use gameabs::solver::{solve, SequenceGame, SolverSettings};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::{kuhn3_matrix, matrix_value_bounds, random_strategy, walk};

#[test]
fn kuhn3_value_matches_pure_strategy_oracle() {
    let m = kuhn3_matrix();
    let (lower, upper) = matrix_value_bounds(&m, 20_000);
    let known = -1.0 / 18.0;
    assert!(lower <= known + 1e-12 && known <= upper + 1e-12, "[{lower}, {upper}]");
    assert!(upper - lower < 2e-3, "[{lower}, {upper}]");

    let game = build_kuhn(&KuhnSpec::new(3)).unwrap();
    let settings = SolverSettings { max_iterations: 10_000, target_eps: 1e-4, ..Default::default() };
    let (profile, report) = solve(&game, &settings).unwrap();
    let value = SequenceGame::new(&game).unwrap().value(&profile).unwrap();
    assert!(report.exploitability <= 1e-4);
    // An eps-equilibrium's value lies within eps of the game value.
    assert!((value - known).abs() <= 1e-4 + 1e-12, "{value}");
    assert!(value >= lower - 1e-4 && value <= upper + 1e-4);
}

#[test]
fn bilinear_form_equals_tree_walk() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for game in [build_kuhn(&KuhnSpec::new(3)).unwrap(), build_leduc(&LeducSpec::new(3)).unwrap()] {
        let index = index_sequences(&game).unwrap();
        let matrix = build_utility_matrix(&game, &index);
        for _ in 0..100 {
            let strategy = random_strategy(&game, &mut rng);
            let plan = |player: Player| {
                let mut b = vec![0.0; index.dimension(player)];
                for &i in index.infosets(player) {
                    let i = i as usize;
                    for (a, p) in strategy[i].iter().enumerate() {
                        b[index.sequence(i, a)] = *p;
                    }
                }
                index.to_sequence_form(player, &b).unwrap()
            };
            let (x, y) = (plan(Player::One), plan(Player::Two));
            let bilinear = expected_utility(&matrix, &x, &y).unwrap();
            let direct = walk(&game, game.root(), &strategy);
            assert!((bilinear - direct).abs() < 1e-9, "{}: {bilinear} vs {direct}", game.name());
        }
    }
}

/// Counts infosets and terminals by walking the tree, independent of the
/// sequence indexer.
fn enumerate(game: &GameTree) -> ([usize; 2], usize) {
    let mut seen = std::collections::HashSet::new();
    let mut per_player = [0usize; 2];
    let mut terminals = 0;
    let mut stack = vec![game.root()];
    while let Some(id) = stack.pop() {
        let n = game.node(id);
        match n.actor {
            Actor::Terminal => terminals += 1,
            Actor::Chance => {}
            Actor::Player(p) => {
                let i = n.infoset().unwrap();
                if seen.insert(i) {
                    per_player[p.index()] += game.edges(id).len();
                }
            }
        }
        stack.extend(game.edges(id).iter().map(|e| e.child));
    }
    ([per_player[0] + 1, per_player[1] + 1], terminals)
}

#[test]
fn sequence_dimensions_match_enumeration() {
    let kuhn3 = build_kuhn(&KuhnSpec::new(3)).unwrap();
    let (dims, terminals) = enumerate(&kuhn3);
    assert_eq!(dims, [13, 13]);
    let m = size_metrics(&kuhn3).unwrap();
    assert_eq!((m.num_sequences, m.nnz), (26, 30));
    assert_eq!(terminals, 30);

    let kuhn256 = build_kuhn(&KuhnSpec::new(256)).unwrap();
    let (dims, terminals) = enumerate(&kuhn256);
    assert_eq!(dims, [1025, 1025]);
    let m = size_metrics(&kuhn256).unwrap();
    assert_eq!(m.num_sequences, 2050);
    assert!(m.nnz <= terminals);

    let index = index_sequences(&matching_pennies()).unwrap();
    assert_eq!(build_utility_matrix(&matching_pennies(), &index).nnz(), 4);
}

#[test]
fn generated_games_are_valid() {
    for spec in ["kuhn:3", "kuhn:16", "kuhn:256", "leduc:3", "leduc:13"] {
        let game = spec.parse::<GameSpec>().unwrap().build().unwrap();
        assert!(validate_game(&game).is_ok(), "{spec}");
    }
    let leduc13 = build_leduc(&LeducSpec::new(13)).unwrap();
    let metrics = size_metrics(&leduc13).unwrap();
    let (dims, terminals) = enumerate(&leduc13);
    assert_eq!(metrics.num_sequences, dims[0] + dims[1]);
    assert!(metrics.nnz <= terminals);
}
