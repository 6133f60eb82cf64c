use crate::efg::{GameBuilder, GameTree, InfosetKey, Player};

/// Matching pennies as a two-move extensive-form game; player one wins 1 on
/// a match.
pub fn matching_pennies() -> GameTree {
    let mut b = GameBuilder::new();
    let k1 = InfosetKey::new(Player::One, vec![], "");
    let k2 = InfosetKey::new(Player::Two, vec![], "");
    let hh = b.terminal(1.0);
    let ht = b.terminal(-1.0);
    let th = b.terminal(-1.0);
    let tt = b.terminal(1.0);
    let h = b.decision(Player::Two, k2.clone(), &[("H", hh), ("T", ht)]);
    let t = b.decision(Player::Two, k2, &[("H", th), ("T", tt)]);
    let root = b.decision(Player::One, k1, &[("h", h), ("t", t)]);
    b.finish("matching-pennies", root)
}
