use serde::{Deserialize, Serialize};

use super::betting::{betting_round, Round};
use crate::efg::{Domain, GameBuilder, GameTree, Observation};
use crate::error::{Error, Result};

/// N-card Kuhn poker: ante 1, a single bet of 1, one bet per round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KuhnSpec {
    pub num_cards: u32,
}

impl KuhnSpec {
    pub fn new(num_cards: u32) -> Self {
        Self { num_cards }
    }
}

const ANTE: f64 = 1.0;
const BET: f64 = 1.0;

/// Deal token for player one receiving `card`, e.g. `57?`.
pub fn kuhn_row_token(card: u32) -> String {
    format!("{card}?")
}

/// Deal token for player two receiving `card`, e.g. `?12`.
pub fn kuhn_col_token(card: u32) -> String {
    format!("?{card}")
}

/// Parses either deal token back to `(player_index, card)`.
pub fn parse_kuhn_token(token: &str) -> Option<(usize, u32)> {
    if let Some(card) = token.strip_suffix('?') {
        card.parse().ok().map(|c| (0, c))
    } else {
        token.strip_prefix('?').and_then(|c| c.parse().ok()).map(|c| (1, c))
    }
}

pub fn build_kuhn(spec: &KuhnSpec) -> Result<GameTree> {
    let n = spec.num_cards;
    if n < 2 {
        return Err(Error::invalid(format!("Kuhn poker needs at least 2 cards, got {n}")));
    }
    let mut b = GameBuilder::new();
    let p1_prob = 1.0 / n as f64;
    let p2_prob = 1.0 / (n - 1) as f64;
    let mut p1_deals = Vec::with_capacity(n as usize);
    for c1 in 0..n {
        let obs1 = [Observation::new(Domain::KuhnDeal, kuhn_row_token(c1))];
        let mut p2_deals = Vec::with_capacity(n as usize - 1);
        for c2 in (0..n).filter(|&c| c != c1) {
            let obs2 = [Observation::new(Domain::KuhnDeal, kuhn_col_token(c2))];
            let round = Round { observations: [&obs1, &obs2], prefix: "", bet: BET, max_bets: 1 };
            let sign = if c1 > c2 { 1.0 } else { -1.0 };
            let mut showdown = |b: &mut GameBuilder, each: f64, _: &str| b.terminal(sign * each);
            let root = betting_round(&mut b, &round, [ANTE, ANTE], &mut showdown);
            p2_deals.push((kuhn_col_token(c2), p2_prob, root));
        }
        let deal2 = b.chance(&p2_deals);
        p1_deals.push((kuhn_row_token(c1), p1_prob, deal2));
    }
    let root = b.chance(&p1_deals);
    Ok(b.finish(format!("kuhn-{n}"), root))
}
