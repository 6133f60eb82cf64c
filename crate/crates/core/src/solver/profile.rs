use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};

use crate::efg::{GameTree, Player, SequenceIndex};
use crate::error::{Error, Result};

/// Action distributions keyed by the display form of each infoset key. The
/// player is part of the key, so one map holds both players (or, for a
/// best-response fragment, just one).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BehavioralProfile {
    strategies: BTreeMap<String, Vec<f64>>,
}

pub(crate) const DISTRIBUTION_TOL: f64 = 1e-9;

impl BehavioralProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.strategies.get(key).map(Vec::as_slice)
    }

    pub fn insert(&mut self, key: impl Into<String>, probs: Vec<f64>) {
        self.strategies.insert(key.into(), probs);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.strategies.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Merges `other` into `self`, overwriting shared keys.
    pub fn extend(&mut self, other: BehavioralProfile) {
        self.strategies.extend(other.strategies);
    }

    /// Uniform play at every infoset of `game`.
    pub fn uniform(game: &GameTree) -> Self {
        let counts = game.infoset_action_counts();
        let strategies =
            game.infoset_keys().iter().zip(counts).map(|(k, n)| (k.to_string(), vec![1.0 / n as f64; n])).collect();
        Self { strategies }
    }

    /// Builds a profile from per-sequence behavioral vectors of both players.
    pub fn from_sequence_layout(game: &GameTree, index: &SequenceIndex, behavioral: [&[f64]; 2]) -> Self {
        let mut profile = Self::new();
        for p in Player::BOTH {
            profile.extend(Self::player_from_sequence_layout(game, index, p, behavioral[p.index()]));
        }
        profile
    }

    pub fn player_from_sequence_layout(game: &GameTree, index: &SequenceIndex, player: Player, b: &[f64]) -> Self {
        let mut profile = Self::new();
        for &i in index.infosets(player) {
            let i = i as usize;
            let base = index.first_sequence(i);
            profile.insert(game.infoset_key(i).to_string(), b[base..base + index.num_actions(i)].to_vec());
        }
        profile
    }

    /// Per-sequence behavioral vector for `player` (slot 0, the empty
    /// sequence, is unused).
    pub fn to_sequence_layout(&self, game: &GameTree, index: &SequenceIndex, player: Player) -> Result<Vec<f64>> {
        let mut b = vec![0.0; index.dimension(player)];
        for &i in index.infosets(player) {
            let i = i as usize;
            let key = game.infoset_key(i).to_string();
            let probs = self.strategies.get(&key).ok_or_else(|| Error::MissingInfoset(key.clone()))?;
            let n = index.num_actions(i);
            if probs.len() != n {
                return Err(Error::invalid(format!(
                    "infoset `{key}` has {n} actions but the profile lists {}",
                    probs.len()
                )));
            }
            let base = index.first_sequence(i);
            b[base..base + n].copy_from_slice(probs);
        }
        Ok(b)
    }

    /// Every distribution is nonnegative and sums to one.
    pub fn validate(&self) -> Result<()> {
        for (key, probs) in &self.strategies {
            let sum: f64 = probs.iter().sum();
            if probs.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > DISTRIBUTION_TOL {
                return Err(Error::invalid(format!("infoset `{key}` does not hold a distribution")));
            }
        }
        Ok(())
    }

    /// Writes JSON, gzip-compressed when the path ends in `.gz`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = BufWriter::new(File::create(path)?);
        if is_gz(path) {
            let mut enc = GzEncoder::new(file, Compression::default());
            serde_json::to_writer(&mut enc, self)?;
            enc.finish()?.flush()?;
        } else {
            let mut file = file;
            serde_json::to_writer_pretty(&mut file, self)?;
            file.flush()?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = BufReader::new(File::open(path)?);
        let mut text = String::new();
        if is_gz(path) {
            GzDecoder::new(file).read_to_string(&mut text)?;
        } else {
            let mut file = file;
            file.read_to_string(&mut text)?;
        }
        let profile: Self = serde_json::from_str(&text)?;
        profile.validate()?;
        Ok(profile)
    }
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}
