use crate::efg::{build_utility_matrix, index_sequences, GameTree, Player, SequenceIndex, SparseUtilityMatrix};
use crate::error::Result;

use super::profile::BehavioralProfile;

/// A game together with its sequence index and utility matrix, built once
/// and reused across solves and evaluations.
pub struct SequenceGame<'g> {
    pub game: &'g GameTree,
    pub index: SequenceIndex,
    pub matrix: SparseUtilityMatrix,
}

impl<'g> SequenceGame<'g> {
    pub fn new(game: &'g GameTree) -> Result<Self> {
        let index = index_sequences(game)?;
        let matrix = build_utility_matrix(game, &index);
        Ok(Self { game, index, matrix })
    }

    /// Realization plan of `player` under `profile`.
    pub fn plan(&self, profile: &BehavioralProfile, player: Player) -> Result<Vec<f64>> {
        let b = profile.to_sequence_layout(self.game, &self.index, player)?;
        self.index.to_sequence_form(player, &b)
    }

    /// Utility gradient of `player` against the opponent's realization plan,
    /// in `player`'s own utility terms.
    pub(crate) fn gradient(&self, player: Player, opponent_plan: &[f64]) -> Result<Vec<f64>> {
        match player {
            Player::One => self.matrix.mul_col(opponent_plan),
            Player::Two => {
                let mut g = self.matrix.mul_row(opponent_plan)?;
                g.iter_mut().for_each(|v| *v = -*v);
                Ok(g)
            }
        }
    }

    /// Best-response value and pure best-response behavioral strategy (in
    /// per-sequence layout) of `player` against `opponent_plan`.
    pub fn best_response_to_plan(&self, player: Player, opponent_plan: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut cfv = self.gradient(player, opponent_plan)?;
        let mut strategy = vec![0.0; cfv.len()];
        for &i in self.index.infosets(player).iter().rev() {
            let i = i as usize;
            let base = self.index.first_sequence(i);
            let n = self.index.num_actions(i);
            let mut best = base;
            for s in base + 1..base + n {
                if cfv[s] > cfv[best] {
                    best = s;
                }
            }
            strategy[best] = 1.0;
            let v = cfv[best];
            cfv[self.index.parent(i)] += v;
        }
        Ok((cfv[0], strategy))
    }

    /// Best-response value only, from plans.
    pub(crate) fn best_response_value(&self, player: Player, opponent_plan: &[f64]) -> Result<f64> {
        let mut cfv = self.gradient(player, opponent_plan)?;
        for &i in self.index.infosets(player).iter().rev() {
            let i = i as usize;
            let base = self.index.first_sequence(i);
            let v = cfv[base..base + self.index.num_actions(i)].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            cfv[self.index.parent(i)] += v;
        }
        Ok(cfv[0])
    }

    pub(crate) fn exploitability_of_plans(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let br1 = self.best_response_value(Player::One, y)?;
        let br2 = self.best_response_value(Player::Two, x)?;
        Ok((br1 + br2) / 2.0)
    }

    pub fn best_response(&self, opponent: &BehavioralProfile, player: Player) -> Result<(f64, BehavioralProfile)> {
        let opp_plan = self.plan(opponent, player.opponent())?;
        let (value, b) = self.best_response_to_plan(player, &opp_plan)?;
        let fragment = BehavioralProfile::player_from_sequence_layout(self.game, &self.index, player, &b);
        Ok((value, fragment))
    }

    pub fn exploitability(&self, profile: &BehavioralProfile) -> Result<f64> {
        let x = self.plan(profile, Player::One)?;
        let y = self.plan(profile, Player::Two)?;
        self.exploitability_of_plans(&x, &y)
    }

    /// Player-one expected utility of `profile`.
    pub fn value(&self, profile: &BehavioralProfile) -> Result<f64> {
        let x = self.plan(profile, Player::One)?;
        let y = self.plan(profile, Player::Two)?;
        crate::efg::expected_utility(&self.matrix, &x, &y)
    }
}

/// Value `player` obtains by best-responding to `opponent`, in that player's
/// own utility terms, with the pure strategy that attains it.
pub fn best_response(
    game: &GameTree,
    opponent: &BehavioralProfile,
    player: Player,
) -> Result<(f64, BehavioralProfile)> {
    SequenceGame::new(game)?.best_response(opponent, player)
}

/// Average over both players of the gain from deviating to a best response.
pub fn exploitability(game: &GameTree, profile: &BehavioralProfile) -> Result<f64> {
    SequenceGame::new(game)?.exploitability(profile)
}
