use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub type NodeId = u32;

pub(crate) const NO_INFOSET: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Sign that turns player-one utility into this player's utility.
    pub fn sign(self) -> f64 {
        match self {
            Player::One => 1.0,
            Player::Two => -1.0,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::One => "1",
            Player::Two => "2",
        })
    }
}

/// The chance-event family an observation belongs to. Abstraction maps are
/// defined per domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    /// Private card deals in Kuhn poker, one event per (player, card).
    KuhnDeal,
    /// Leduc hole cards.
    LeducPreflop,
    /// Leduc (hole card, public card) pairs.
    LeducFlop,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::KuhnDeal => "kuhn-deal",
            Domain::LeducPreflop => "leduc-preflop",
            Domain::LeducFlop => "leduc-flop",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Domain {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kuhn-deal" => Ok(Domain::KuhnDeal),
            "leduc-preflop" => Ok(Domain::LeducPreflop),
            "leduc-flop" => Ok(Domain::LeducFlop),
            other => Err(crate::Error::invalid(format!("unknown domain `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Observation {
    pub domain: Domain,
    pub token: String,
}

impl Observation {
    pub fn new(domain: Domain, token: impl Into<String>) -> Self {
        Self { domain, token: token.into() }
    }
}

/// Identifies an information set: the acting player, that player's private
/// observations so far, and the public action history.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InfosetKey {
    pub player: Player,
    pub observations: Vec<Observation>,
    pub history: String,
}

impl InfosetKey {
    pub fn new(player: Player, observations: Vec<Observation>, history: impl Into<String>) -> Self {
        Self { player, observations, history: history.into() }
    }
}

impl fmt::Display for InfosetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|", self.player)?;
        for (i, obs) in self.observations.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&obs.token)?;
        }
        write!(f, "|{}", self.history)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Actor {
    Player(Player),
    Chance,
    Terminal,
}

#[derive(Clone, Copy, Debug)]
pub struct Node {
    pub actor: Actor,
    pub(crate) infoset: u32,
    /// Player-one utility; meaningful only at terminals.
    pub utility: f64,
    pub(crate) first_edge: u32,
    pub(crate) num_edges: u32,
}

impl Node {
    pub fn infoset(&self) -> Option<usize> {
        (self.infoset != NO_INFOSET).then_some(self.infoset as usize)
    }

    pub fn num_children(&self) -> usize {
        self.num_edges as usize
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Edge {
    pub child: NodeId,
    pub(crate) label: u32,
    /// Outcome probability at chance nodes, 0 elsewhere.
    pub prob: f64,
}

/// A two-player zero-sum extensive-form game stored as a flat arena.
#[derive(Clone, Debug)]
pub struct GameTree {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    labels: Vec<String>,
    infosets: Vec<InfosetKey>,
    /// One node per infoset, used to read its action labels.
    representative: Vec<NodeId>,
    root: NodeId,
}

fn representatives(nodes: &[Node], num_infosets: usize) -> Vec<NodeId> {
    let mut rep = vec![NodeId::MAX; num_infosets];
    for (id, n) in nodes.iter().enumerate() {
        if let Some(i) = n.infoset() {
            if rep[i] == NodeId::MAX {
                rep[i] = id as NodeId;
            }
        }
    }
    rep
}

impl GameTree {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self, id: NodeId) -> &[Edge] {
        let n = &self.nodes[id as usize];
        &self.edges[n.first_edge as usize..(n.first_edge + n.num_edges) as usize]
    }

    pub fn edge_label(&self, edge: &Edge) -> &str {
        &self.labels[edge.label as usize]
    }

    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    pub fn infoset_key(&self, id: usize) -> &InfosetKey {
        &self.infosets[id]
    }

    pub fn infoset_keys(&self) -> &[InfosetKey] {
        &self.infosets
    }

    pub fn num_terminals(&self) -> usize {
        self.nodes.iter().filter(|n| n.actor == Actor::Terminal).count()
    }

    /// Action labels available at the given infoset, read from its first node.
    pub fn infoset_actions(&self, infoset: usize) -> Vec<&str> {
        self.edges(self.representative[infoset]).iter().map(|e| self.edge_label(e)).collect()
    }

    /// Number of actions at each infoset, indexed by infoset id.
    pub fn infoset_action_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.infosets.len()];
        for n in &self.nodes {
            if let Some(i) = n.infoset() {
                counts[i] = n.num_children();
            }
        }
        counts
    }

    /// Rebuilds the infoset table by mapping every key through `relabel`.
    /// Keys that collide after relabeling are merged into one infoset.
    pub fn relabel_infosets<F>(&self, mut relabel: F) -> Result<GameTree>
    where
        F: FnMut(&InfosetKey) -> Result<InfosetKey>,
    {
        let mut ids: HashMap<InfosetKey, u32> = HashMap::new();
        let mut keys = Vec::new();
        let mut remap = Vec::with_capacity(self.infosets.len());
        for key in &self.infosets {
            let new_key = relabel(key)?;
            let id = *ids.entry(new_key.clone()).or_insert_with(|| {
                keys.push(new_key);
                (keys.len() - 1) as u32
            });
            remap.push(id);
        }
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .map(|n| {
                let mut n = *n;
                if n.infoset != NO_INFOSET {
                    n.infoset = remap[n.infoset as usize];
                }
                n
            })
            .collect();
        Ok(GameTree {
            name: self.name.clone(),
            representative: representatives(&nodes, keys.len()),
            nodes,
            edges: self.edges.clone(),
            labels: self.labels.clone(),
            infosets: keys,
            root: self.root,
        })
    }

    /// Probability-weighted walk computing the player-one expected utility
    /// of a behavioral profile given as `strategy(infoset, action) -> prob`.
    pub fn expected_value_by_walk<F>(&self, strategy: &F) -> f64
    where
        F: Fn(usize, usize) -> f64,
    {
        self.walk_value(self.root, strategy)
    }

    fn walk_value<F>(&self, id: NodeId, strategy: &F) -> f64
    where
        F: Fn(usize, usize) -> f64,
    {
        let node = self.node(id);
        match node.actor {
            Actor::Terminal => node.utility,
            Actor::Chance => self.edges(id).iter().map(|e| e.prob * self.walk_value(e.child, strategy)).sum(),
            Actor::Player(_) => {
                let infoset = node.infoset as usize;
                self.edges(id)
                    .iter()
                    .enumerate()
                    .map(|(a, e)| {
                        let p = strategy(infoset, a);
                        if p == 0.0 {
                            0.0
                        } else {
                            p * self.walk_value(e.child, strategy)
                        }
                    })
                    .sum()
            }
        }
    }
}

/// Bottom-up constructor for [`GameTree`]: children are added before their
/// parent, and [`GameBuilder::finish`] names the root. No validation happens
/// here; see [`crate::efg::validate_game`].
#[derive(Default)]
pub struct GameBuilder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    labels: Vec<String>,
    label_ids: HashMap<String, u32>,
    infosets: Vec<InfosetKey>,
    infoset_ids: HashMap<InfosetKey, u32>,
}

impl GameBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn label_id(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.label_ids.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_owned());
        self.label_ids.insert(label.to_owned(), id);
        id
    }

    fn push(&mut self, actor: Actor, infoset: u32, utility: f64, edges: Vec<Edge>) -> NodeId {
        let first_edge = self.edges.len() as u32;
        let num_edges = edges.len() as u32;
        self.edges.extend(edges);
        self.nodes.push(Node { actor, infoset, utility, first_edge, num_edges });
        (self.nodes.len() - 1) as NodeId
    }

    pub fn terminal(&mut self, u1: f64) -> NodeId {
        self.push(Actor::Terminal, NO_INFOSET, u1, Vec::new())
    }

    pub fn chance<S: AsRef<str>>(&mut self, outcomes: &[(S, f64, NodeId)]) -> NodeId {
        let edges = outcomes
            .iter()
            .map(|(label, prob, child)| Edge { child: *child, label: self.label_id(label.as_ref()), prob: *prob })
            .collect();
        self.push(Actor::Chance, NO_INFOSET, 0.0, edges)
    }

    pub fn decision<S: AsRef<str>>(&mut self, player: Player, key: InfosetKey, actions: &[(S, NodeId)]) -> NodeId {
        let infoset = match self.infoset_ids.get(&key) {
            Some(&id) => id,
            None => {
                let id = self.infosets.len() as u32;
                self.infosets.push(key.clone());
                self.infoset_ids.insert(key, id);
                id
            }
        };
        let edges = actions
            .iter()
            .map(|(label, child)| Edge { child: *child, label: self.label_id(label.as_ref()), prob: 0.0 })
            .collect();
        self.push(Actor::Player(player), infoset, 0.0, edges)
    }

    pub fn finish(self, name: impl Into<String>, root: NodeId) -> GameTree {
        GameTree {
            name: name.into(),
            representative: representatives(&self.nodes, self.infosets.len()),
            nodes: self.nodes,
            edges: self.edges,
            labels: self.labels,
            infosets: self.infosets,
            root,
        }
    }
}
