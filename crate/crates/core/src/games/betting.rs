//! Limit betting rounds shared by the poker variants.
//!
//! Action tokens: `c` check or call, `b` bet, `r` raise, `f` fold. Player one
//! writes them in lowercase and player two in uppercase, so a history such as
//! `cBf` reads "player one checks, player two bets, player one folds".

use crate::efg::{GameBuilder, InfosetKey, NodeId, Observation, Player};

pub(crate) fn token(player: Player, action: char) -> String {
    match player {
        Player::One => action.to_ascii_lowercase().to_string(),
        Player::Two => action.to_ascii_uppercase().to_string(),
    }
}

pub(crate) struct Round<'a> {
    /// Private observations of each player during this round.
    pub observations: [&'a [Observation]; 2],
    /// Public history of earlier rounds, including the separator.
    pub prefix: &'a str,
    pub bet: f64,
    pub max_bets: u8,
}

#[derive(Clone)]
struct State {
    tokens: String,
    bets: u8,
    contrib: [f64; 2],
    to_act: Player,
}

/// Builds one betting round. `on_close` receives the per-player commitment
/// and the full public history when both players are still in; folds become
/// terminals here.
pub(crate) fn betting_round<F>(b: &mut GameBuilder, round: &Round<'_>, contrib: [f64; 2], on_close: &mut F) -> NodeId
where
    F: FnMut(&mut GameBuilder, f64, &str) -> NodeId,
{
    let start = State { tokens: String::new(), bets: 0, contrib, to_act: Player::One };
    node(b, round, start, on_close)
}

fn node<F>(b: &mut GameBuilder, round: &Round<'_>, st: State, on_close: &mut F) -> NodeId
where
    F: FnMut(&mut GameBuilder, f64, &str) -> NodeId,
{
    let p = st.to_act;
    let (me, them) = (p.index(), p.opponent().index());
    let history = format!("{}{}", round.prefix, st.tokens);
    let key = InfosetKey::new(p, round.observations[me].to_vec(), history.clone());
    let mut actions: Vec<(String, NodeId)> = Vec::with_capacity(3);

    let facing_bet = st.contrib[me] < st.contrib[them];
    if facing_bet {
        let fold = token(p, 'f');
        let u1 = match p {
            Player::One => -st.contrib[0],
            Player::Two => st.contrib[1],
        };
        actions.push((fold, b.terminal(u1)));

        let call = token(p, 'c');
        let closed = on_close(b, st.contrib[them], &format!("{history}{call}"));
        actions.push((call, closed));

        if st.bets < round.max_bets {
            let raise = token(p, 'r');
            let mut next = st.clone();
            next.contrib[me] = st.contrib[them] + round.bet;
            next.bets += 1;
            next.tokens.push_str(&raise);
            next.to_act = p.opponent();
            actions.push((raise, node(b, round, next, on_close)));
        }
    } else {
        let check = token(p, 'c');
        let child = if st.tokens.is_empty() {
            let mut next = st.clone();
            next.tokens.push_str(&check);
            next.to_act = p.opponent();
            node(b, round, next, on_close)
        } else {
            on_close(b, st.contrib[me], &format!("{history}{check}"))
        };
        actions.push((check, child));

        if st.bets < round.max_bets {
            let bet = token(p, 'b');
            let mut next = st.clone();
            next.contrib[me] += round.bet;
            next.bets += 1;
            next.tokens.push_str(&bet);
            next.to_act = p.opponent();
            actions.push((bet, node(b, round, next, on_close)));
        }
    }
    b.decision(p, key, &actions)
}
