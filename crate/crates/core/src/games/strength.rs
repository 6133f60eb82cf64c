use std::str::FromStr;

use super::leduc::leduc_deck;
use crate::error::{Error, Result};

/// Which observation family to order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrengthKind {
    /// Kuhn hole cards, as ordinal strings `0..n`.
    Kuhn { num_cards: u32 },
    /// Leduc hole-card texts.
    LeducPreflop { num_ranks: u8 },
    /// Leduc (hole, public) texts such as `KhAs`.
    LeducFlop { num_ranks: u8 },
}

impl FromStr for StrengthKind {
    type Err = Error;

    /// Parses `kuhn:N`, `leduc-preflop:R` or `leduc-flop:R`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, size) = s.split_once(':').ok_or_else(|| Error::invalid(format!("expected KIND:SIZE, got `{s}`")))?;
        let bad = || Error::invalid(format!("bad size in `{s}`"));
        match kind {
            "kuhn" => Ok(StrengthKind::Kuhn { num_cards: size.parse().map_err(|_| bad())? }),
            "leduc-preflop" => Ok(StrengthKind::LeducPreflop { num_ranks: size.parse().map_err(|_| bad())? }),
            "leduc-flop" => Ok(StrengthKind::LeducFlop { num_ranks: size.parse().map_err(|_| bad())? }),
            other => Err(Error::invalid(format!("unknown strength ordering `{other}`"))),
        }
    }
}

/// Observations of one kind, weakest first.
///
/// Leduc flop observations put every unpaired (hole, public) combination
/// first, by hole rank then public rank, followed by the paired ones by rank.
/// Suit order (hearts before spades) breaks remaining ties.
pub fn strength_order(kind: StrengthKind) -> Vec<String> {
    match kind {
        StrengthKind::Kuhn { num_cards } => (0..num_cards).map(|c| c.to_string()).collect(),
        StrengthKind::LeducPreflop { num_ranks } => leduc_deck(num_ranks).iter().map(|c| c.to_string()).collect(),
        StrengthKind::LeducFlop { num_ranks } => {
            let deck = leduc_deck(num_ranks);
            let mut pairs: Vec<_> =
                deck.iter().flat_map(|&h| deck.iter().filter(move |&&b| b != h).map(move |&b| (h, b))).collect();
            pairs.sort_by_key(|&(h, b)| (h.rank == b.rank, h.rank, b.rank, h.suit, b.suit));
            pairs.into_iter().map(|(h, b)| format!("{h}{b}")).collect()
        }
    }
}
