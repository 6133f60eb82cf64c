use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::tree::{Actor, GameTree, NodeId, Player};
use crate::error::{Error, Result};

const UNSEEN: u32 = u32::MAX;

/// Sequence-form view of both players' decision problems.
///
/// Sequence 0 of each player is the empty sequence. Ids are assigned in
/// depth-first order of first visit, following edges in action order.
#[derive(Clone, Debug)]
pub struct SequenceIndex {
    /// First sequence id of each infoset's actions, by global infoset id.
    seq_base: Vec<u32>,
    /// Parent sequence of each infoset, by global infoset id.
    parent_seq: Vec<u32>,
    num_actions: Vec<u32>,
    owner: Vec<Player>,
    /// Each player's infosets in the order their ids were assigned.
    order: [Vec<u32>; 2],
    dims: [usize; 2],
}

impl SequenceIndex {
    pub fn dimension(&self, player: Player) -> usize {
        self.dims[player.index()]
    }

    /// Infosets of `player`, parents before children.
    pub fn infosets(&self, player: Player) -> &[u32] {
        &self.order[player.index()]
    }

    pub fn sequence(&self, infoset: usize, action: usize) -> usize {
        self.seq_base[infoset] as usize + action
    }

    pub fn first_sequence(&self, infoset: usize) -> usize {
        self.seq_base[infoset] as usize
    }

    pub fn parent(&self, infoset: usize) -> usize {
        self.parent_seq[infoset] as usize
    }

    pub fn num_actions(&self, infoset: usize) -> usize {
        self.num_actions[infoset] as usize
    }

    pub fn owner(&self, infoset: usize) -> Player {
        self.owner[infoset]
    }

    pub fn num_infosets(&self) -> usize {
        self.seq_base.len()
    }

    /// Converts a behavioral strategy stored per sequence (the probability of
    /// action `a` at `I` lives at `sequence(I, a)`) into a realization plan.
    pub fn to_sequence_form(&self, player: Player, behavioral: &[f64]) -> Result<Vec<f64>> {
        self.check_len(player, behavioral.len())?;
        let mut x = vec![0.0; behavioral.len()];
        x[0] = 1.0;
        for &i in self.infosets(player) {
            let i = i as usize;
            let parent = x[self.parent(i)];
            let base = self.first_sequence(i);
            for s in base..base + self.num_actions(i) {
                x[s] = parent * behavioral[s];
            }
        }
        Ok(x)
    }

    /// Inverse of [`SequenceIndex::to_sequence_form`]; infosets reached with
    /// zero mass get the uniform distribution.
    pub fn to_behavioral(&self, player: Player, plan: &[f64]) -> Result<Vec<f64>> {
        self.check_len(player, plan.len())?;
        let mut b = vec![0.0; plan.len()];
        for &i in self.infosets(player) {
            let i = i as usize;
            let base = self.first_sequence(i);
            let n = self.num_actions(i);
            let total: f64 = plan[base..base + n].iter().sum();
            for s in base..base + n {
                b[s] = if total > 0.0 { plan[s] / total } else { 1.0 / n as f64 };
            }
        }
        Ok(b)
    }

    /// Uniform behavioral strategy in per-sequence layout.
    pub fn uniform(&self, player: Player) -> Vec<f64> {
        let mut b = vec![0.0; self.dimension(player)];
        for &i in self.infosets(player) {
            let i = i as usize;
            let n = self.num_actions(i);
            let base = self.first_sequence(i);
            b[base..base + n].fill(1.0 / n as f64);
        }
        b
    }

    /// Largest violation of the flow constraints of `plan`.
    pub fn flow_residual(&self, player: Player, plan: &[f64]) -> f64 {
        let mut worst = (plan[0] - 1.0).abs();
        for &i in self.infosets(player) {
            let i = i as usize;
            let base = self.first_sequence(i);
            let out: f64 = plan[base..base + self.num_actions(i)].iter().sum();
            worst = worst.max((out - plan[self.parent(i)]).abs());
        }
        worst
    }

    fn check_len(&self, player: Player, len: usize) -> Result<()> {
        let expected = self.dimension(player);
        if len != expected {
            return Err(Error::DimensionMismatch { expected, got: len });
        }
        Ok(())
    }
}

/// Assigns sequence ids to every (infoset, action) pair of both players.
pub fn index_sequences(game: &GameTree) -> Result<SequenceIndex> {
    let n = game.num_infosets();
    let mut idx = SequenceIndex {
        seq_base: vec![UNSEEN; n],
        parent_seq: vec![UNSEEN; n],
        num_actions: vec![0; n],
        owner: vec![Player::One; n],
        order: [Vec::new(), Vec::new()],
        dims: [1, 1],
    };
    visit(game, game.root(), [0, 0], &mut idx)?;
    Ok(idx)
}

fn visit(game: &GameTree, id: NodeId, seqs: [u32; 2], idx: &mut SequenceIndex) -> Result<()> {
    let node = game.node(id);
    match node.actor {
        Actor::Terminal => Ok(()),
        Actor::Chance => {
            for e in game.edges(id) {
                visit(game, e.child, seqs, idx)?;
            }
            Ok(())
        }
        Actor::Player(p) => {
            let i = node.infoset as usize;
            let own = seqs[p.index()];
            if idx.seq_base[i] == UNSEEN {
                let dim = &mut idx.dims[p.index()];
                idx.seq_base[i] = *dim as u32;
                idx.parent_seq[i] = own;
                idx.num_actions[i] = node.num_children() as u32;
                idx.owner[i] = p;
                *dim += node.num_children();
                idx.order[p.index()].push(i as u32);
            } else if idx.parent_seq[i] != own
                || idx.owner[i] != p
                || idx.num_actions[i] as usize != node.num_children()
            {
                return Err(Error::ImperfectRecall(game.infoset_key(i).to_string()));
            }
            for (a, e) in game.edges(id).iter().enumerate() {
                let mut next = seqs;
                next[p.index()] = idx.seq_base[i] + a as u32;
                visit(game, e.child, next, idx)?;
            }
            Ok(())
        }
    }
}

/// Sparse sequence-form payoff matrix for player one, stored row-major.
#[derive(Clone, Debug)]
pub struct SparseUtilityMatrix {
    rows: Vec<u32>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    dims: (usize, usize),
}

/// Aggregated cells smaller than this are treated as cancellation noise.
const ZERO_CELL: f64 = 1e-15;

impl SparseUtilityMatrix {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.dims
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows.iter().zip(&self.cols).zip(&self.vals).map(|((&r, &c), &v)| (r as usize, c as usize, v))
    }

    /// `A y`: player one's utility gradient.
    pub fn mul_col(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dims.1, y.len())?;
        let mut out = vec![0.0; self.dims.0];
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            out[r as usize] += v * y[c as usize];
        }
        Ok(out)
    }

    /// `Aᵀ x`.
    pub fn mul_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dims.0, x.len())?;
        let mut out = vec![0.0; self.dims.1];
        for ((&r, &c), &v) in self.rows.iter().zip(&self.cols).zip(&self.vals) {
            out[c as usize] += v * x[r as usize];
        }
        Ok(out)
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub fn build_utility_matrix(game: &GameTree, index: &SequenceIndex) -> SparseUtilityMatrix {
    let mut cells: HashMap<(u32, u32), f64> = HashMap::new();
    let mut stack: Vec<(NodeId, [u32; 2], f64)> = vec![(game.root(), [0, 0], 1.0)];
    while let Some((id, seqs, reach)) = stack.pop() {
        let node = game.node(id);
        match node.actor {
            Actor::Terminal => {
                *cells.entry((seqs[0], seqs[1])).or_insert(0.0) += reach * node.utility;
            }
            Actor::Chance => {
                for e in game.edges(id) {
                    if e.prob > 0.0 {
                        stack.push((e.child, seqs, reach * e.prob));
                    }
                }
            }
            Actor::Player(p) => {
                let base = index.first_sequence(node.infoset as usize) as u32;
                for (a, e) in game.edges(id).iter().enumerate() {
                    let mut next = seqs;
                    next[p.index()] = base + a as u32;
                    stack.push((e.child, next, reach));
                }
            }
        }
    }
    let mut entries: Vec<((u32, u32), f64)> = cells.into_iter().filter(|(_, v)| v.abs() >= ZERO_CELL).collect();
    entries.sort_unstable_by_key(|e| e.0);
    let mut m = SparseUtilityMatrix {
        rows: Vec::with_capacity(entries.len()),
        cols: Vec::with_capacity(entries.len()),
        vals: Vec::with_capacity(entries.len()),
        dims: (index.dimension(Player::One), index.dimension(Player::Two)),
    };
    for ((r, c), v) in entries {
        m.rows.push(r);
        m.cols.push(c);
        m.vals.push(v);
    }
    m
}

/// `xᵀ A y` for realization plans `x` and `y`.
pub fn expected_utility(matrix: &SparseUtilityMatrix, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(matrix.dims.0, x.len())?;
    check_dim(matrix.dims.1, y.len())?;
    Ok(matrix.entries().map(|(r, c, v)| v * x[r] * y[c]).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeMetrics {
    pub num_sequences: usize,
    pub nnz: usize,
}

impl SizeMetrics {
    /// Componentwise `<=`.
    pub fn le(&self, other: &SizeMetrics) -> bool {
        self.num_sequences <= other.num_sequences && self.nnz <= other.nnz
    }
}

pub fn size_metrics(game: &GameTree) -> Result<SizeMetrics> {
    let index = index_sequences(game)?;
    let matrix = build_utility_matrix(game, &index);
    Ok(SizeMetrics { num_sequences: index.dimension(Player::One) + index.dimension(Player::Two), nnz: matrix.nnz() })
}
