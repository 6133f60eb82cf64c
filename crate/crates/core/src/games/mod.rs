//! Benchmark games and card vocabulary.

mod betting;
mod cards;
mod kuhn;
mod leduc;
mod strength;
mod toy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cards::{card_text, hand_text, Card, Suit, RANK_CHARS};
pub use kuhn::{build_kuhn, kuhn_col_token, kuhn_row_token, parse_kuhn_token, KuhnSpec};
pub use leduc::{build_leduc, leduc_deck, leduc_showdown, LeducSpec, LEDUC_SUITS};
pub use strength::{strength_order, StrengthKind};
pub use toy::matching_pennies;

use crate::efg::GameTree;
use crate::error::{Error, Result};

/// A benchmark game selector, written `kuhn:N` or `leduc:R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GameSpec {
    Kuhn { num_cards: u32 },
    Leduc { num_ranks: u8 },
}

impl GameSpec {
    pub fn build(&self) -> Result<GameTree> {
        match *self {
            GameSpec::Kuhn { num_cards } => build_kuhn(&KuhnSpec::new(num_cards)),
            GameSpec::Leduc { num_ranks } => build_leduc(&LeducSpec::new(num_ranks)),
        }
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameSpec::Kuhn { num_cards } => write!(f, "kuhn:{num_cards}"),
            GameSpec::Leduc { num_ranks } => write!(f, "leduc:{num_ranks}"),
        }
    }
}

impl FromStr for GameSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("expected kuhn:N or leduc:R, got `{s}`"));
        let (kind, size) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "kuhn" => Ok(GameSpec::Kuhn { num_cards: size.parse().map_err(|_| bad())? }),
            "leduc" => Ok(GameSpec::Leduc { num_ranks: size.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}
