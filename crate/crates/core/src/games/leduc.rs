use serde::{Deserialize, Serialize};

use super::betting::{betting_round, Round};
use super::cards::{Card, Suit};
use crate::efg::{Domain, GameBuilder, GameTree, Observation};
use crate::error::{Error, Result};

/// N-rank Leduc hold'em: two suits, ante 1, a preflop round with bet 2 and a
/// flop round with bet 4, at most two bets per round. Player one acts first
/// in both rounds and equal hands split the pot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeducSpec {
    pub num_ranks: u8,
}

impl LeducSpec {
    pub fn new(num_ranks: u8) -> Self {
        Self { num_ranks }
    }

    pub fn deck(&self) -> Vec<Card> {
        leduc_deck(self.num_ranks)
    }
}

pub const LEDUC_SUITS: [Suit; 2] = [Suit::Hearts, Suit::Spades];
const ANTE: f64 = 1.0;
const BET_SIZES: [f64; 2] = [2.0, 4.0];
const MAX_BETS: u8 = 2;

/// Rank-major deck: `2h 2s 3h 3s ...`.
pub fn leduc_deck(num_ranks: u8) -> Vec<Card> {
    (0..num_ranks).flat_map(|r| LEDUC_SUITS.map(|s| Card::new(r, s))).collect()
}

/// Player-one utility sign at showdown: pairing the board wins, otherwise the
/// higher hole rank wins, equal ranks split.
pub fn leduc_showdown(hole1: Card, hole2: Card, board: Card) -> f64 {
    let paired1 = hole1.rank == board.rank;
    let paired2 = hole2.rank == board.rank;
    match (paired1, paired2) {
        (true, false) => 1.0,
        (false, true) => -1.0,
        _ => match hole1.rank.cmp(&hole2.rank) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => -1.0,
            std::cmp::Ordering::Equal => 0.0,
        },
    }
}

pub fn build_leduc(spec: &LeducSpec) -> Result<GameTree> {
    if spec.num_ranks < 2 {
        return Err(Error::invalid(format!("Leduc hold'em needs at least 2 ranks, got {}", spec.num_ranks)));
    }
    let deck = spec.deck();
    let texts: Vec<String> = deck.iter().map(|c| c.to_string()).collect();
    let n = deck.len();
    let mut b = GameBuilder::new();

    let mut first = Vec::with_capacity(n);
    for i in 0..n {
        let mut second = Vec::with_capacity(n - 1);
        for j in (0..n).filter(|&j| j != i) {
            let root = deal_subtree(&mut b, &deck, &texts, i, j);
            second.push((format!("?{}", texts[j]), 1.0 / (n - 1) as f64, root));
        }
        let node = b.chance(&second);
        first.push((format!("{}?", texts[i]), 1.0 / n as f64, node));
    }
    let root = b.chance(&first);
    Ok(b.finish(format!("leduc-{}", spec.num_ranks), root))
}

fn deal_subtree(b: &mut GameBuilder, deck: &[Card], texts: &[String], i: usize, j: usize) -> u32 {
    let pre = [
        [Observation::new(Domain::LeducPreflop, texts[i].clone())],
        [Observation::new(Domain::LeducPreflop, texts[j].clone())],
    ];
    let preflop = Round { observations: [&pre[0], &pre[1]], prefix: "", bet: BET_SIZES[0], max_bets: MAX_BETS };
    let boards: Vec<usize> = (0..deck.len()).filter(|&k| k != i && k != j).collect();
    let board_prob = 1.0 / boards.len() as f64;

    let mut to_flop = |b: &mut GameBuilder, each: f64, history: &str| {
        let prefix = format!("{history}/");
        let mut outcomes = Vec::with_capacity(boards.len());
        for &k in &boards {
            let flop_obs = |hole: usize| {
                [
                    Observation::new(Domain::LeducPreflop, texts[hole].clone()),
                    Observation::new(Domain::LeducFlop, format!("{}{}", texts[hole], texts[k])),
                ]
            };
            let obs = [flop_obs(i), flop_obs(j)];
            let flop =
                Round { observations: [&obs[0], &obs[1]], prefix: &prefix, bet: BET_SIZES[1], max_bets: MAX_BETS };
            let sign = leduc_showdown(deck[i], deck[j], deck[k]);
            let mut showdown = |b: &mut GameBuilder, each: f64, _: &str| b.terminal(sign * each);
            let node = betting_round(b, &flop, [each, each], &mut showdown);
            outcomes.push((format!("b{}", texts[k]), board_prob, node));
        }
        b.chance(&outcomes)
    };
    betting_round(b, &preflop, [ANTE, ANTE], &mut to_flop)
}
