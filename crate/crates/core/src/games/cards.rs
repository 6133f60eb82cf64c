use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RANK_CHARS: &[u8; 13] = b"23456789TJQKA";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Suit {
    Clubs,
    Diamonds,
    Hearts,
    Spades,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Clubs, Suit::Diamonds, Suit::Hearts, Suit::Spades];

    pub fn as_char(self) -> char {
        match self {
            Suit::Clubs => 'c',
            Suit::Diamonds => 'd',
            Suit::Hearts => 'h',
            Suit::Spades => 's',
        }
    }
}

/// A playing card; `rank` is 0-based, with 0 the deuce and 12 the ace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Card {
    pub rank: u8,
    pub suit: Suit,
}

impl Card {
    pub fn new(rank: u8, suit: Suit) -> Self {
        Self { rank, suit }
    }
}

/// Two-character card text: rank character followed by suit character,
/// e.g. `As` for the ace of spades.
pub fn card_text(card: Card) -> Result<String> {
    let rank = RANK_CHARS
        .get(card.rank as usize)
        .ok_or_else(|| Error::invalid(format!("rank {} has no text form", card.rank)))?;
    Ok(format!("{}{}", *rank as char, card.suit.as_char()))
}

/// Concatenated card texts, e.g. `AsAh`.
pub fn hand_text(cards: &[Card]) -> Result<String> {
    cards.iter().map(|&c| card_text(c)).collect()
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match card_text(*self) {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "r{}{}", self.rank, self.suit.as_char()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_forms() {
        assert_eq!(card_text(Card::new(12, Suit::Spades)).unwrap(), "As");
        assert_eq!(card_text(Card::new(0, Suit::Clubs)).unwrap(), "2c");
        let aces = [Card::new(12, Suit::Spades), Card::new(12, Suit::Hearts)];
        assert_eq!(hand_text(&aces).unwrap(), "AsAh");
        assert!(card_text(Card::new(13, Suit::Hearts)).is_err());
    }
}
