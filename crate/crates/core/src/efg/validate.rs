use std::fmt;

use super::tree::{Actor, GameTree, NodeId};

/// One broken [`GameTree`] invariant.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    ChanceSum { node: NodeId, sum: f64 },
    BadProbability { node: NodeId, prob: f64 },
    NonFiniteUtility { node: NodeId },
    EmptyDecision { node: NodeId },
    ActorMismatch { infoset: String },
    ActionMismatch { infoset: String },
    ImperfectRecall { infoset: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ChanceSum { node, sum } => {
                write!(f, "chance node {node}: outcome probabilities sum to {sum}")
            }
            Violation::BadProbability { node, prob } => {
                write!(f, "chance node {node}: invalid probability {prob}")
            }
            Violation::NonFiniteUtility { node } => write!(f, "terminal {node}: utility is not finite"),
            Violation::EmptyDecision { node } => write!(f, "decision node {node} has no actions"),
            Violation::ActorMismatch { infoset } => {
                write!(f, "infoset `{infoset}` contains nodes of different actors")
            }
            Violation::ActionMismatch { infoset } => {
                write!(f, "infoset `{infoset}` has nodes with different action lists")
            }
            Violation::ImperfectRecall { infoset } => {
                write!(f, "infoset `{infoset}` is reached through different own histories")
            }
        }
    }
}

const PROB_SUM_TOL: f64 = 1e-12;

/// Own-history marker: the last (infoset, action) of the acting player on the
/// path, or `None` for the empty sequence.
type LastMove = Option<(u32, u32)>;

/// Checks every structural invariant of `game` and reports all violations.
pub fn validate_game(game: &GameTree) -> Result<(), Vec<Violation>> {
    let n_infosets = game.num_infosets();
    let mut first_node: Vec<Option<NodeId>> = vec![None; n_infosets];
    let mut parent: Vec<Option<LastMove>> = vec![None; n_infosets];
    let mut flagged = vec![[false; 3]; n_infosets];
    let mut violations = Vec::new();

    let mut stack: Vec<(NodeId, [LastMove; 2])> = vec![(game.root(), [None, None])];
    while let Some((id, last)) = stack.pop() {
        let node = game.node(id);
        match node.actor {
            Actor::Terminal => {
                if !node.utility.is_finite() {
                    violations.push(Violation::NonFiniteUtility { node: id });
                }
            }
            Actor::Chance => {
                let mut sum = 0.0;
                for e in game.edges(id) {
                    if !(e.prob.is_finite() && e.prob >= 0.0) {
                        violations.push(Violation::BadProbability { node: id, prob: e.prob });
                    }
                    sum += e.prob;
                    stack.push((e.child, last));
                }
                if (sum - 1.0).abs() > PROB_SUM_TOL {
                    violations.push(Violation::ChanceSum { node: id, sum });
                }
            }
            Actor::Player(player) => {
                if node.num_children() == 0 {
                    violations.push(Violation::EmptyDecision { node: id });
                }
                let infoset = node.infoset as usize;
                let key = game.infoset_key(infoset);
                let own = last[player.index()];
                match first_node[infoset] {
                    None => {
                        first_node[infoset] = Some(id);
                        parent[infoset] = Some(own);
                        if key.player != player {
                            flag(&mut violations, &mut flagged[infoset], 0, || Violation::ActorMismatch {
                                infoset: key.to_string(),
                            });
                        }
                    }
                    Some(first) => {
                        let other = game.node(first);
                        if other.actor != node.actor {
                            flag(&mut violations, &mut flagged[infoset], 0, || Violation::ActorMismatch {
                                infoset: key.to_string(),
                            });
                        }
                        let same_actions = game.edges(first).len() == game.edges(id).len()
                            && game
                                .edges(first)
                                .iter()
                                .zip(game.edges(id))
                                .all(|(a, b)| game.edge_label(a) == game.edge_label(b));
                        if !same_actions {
                            flag(&mut violations, &mut flagged[infoset], 1, || Violation::ActionMismatch {
                                infoset: key.to_string(),
                            });
                        }
                        if parent[infoset] != Some(own) {
                            flag(&mut violations, &mut flagged[infoset], 2, || Violation::ImperfectRecall {
                                infoset: key.to_string(),
                            });
                        }
                    }
                }
                for (a, e) in game.edges(id).iter().enumerate() {
                    let mut next = last;
                    next[player.index()] = Some((infoset as u32, a as u32));
                    stack.push((e.child, next));
                }
            }
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

fn flag(out: &mut Vec<Violation>, seen: &mut [bool; 3], slot: usize, v: impl FnOnce() -> Violation) {
    if !seen[slot] {
        seen[slot] = true;
        out.push(v());
    }
}
