//! Token corpora: sampled playthroughs or external whitespace-tokenized text.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::efg::{Actor, GameTree};
use crate::error::{Error, Result};
use crate::solver::BehavioralProfile;

/// One playthrough (or document) per line, tokens separated by single spaces.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corpus {
    lines: Vec<String>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a line, normalizing whitespace. Blank lines are skipped.
    pub fn push_line(&mut self, line: &str) {
        let joined = line.split_whitespace().collect::<Vec<_>>().join(" ");
        if !joined.is_empty() {
            self.lines.push(joined);
        }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn lines(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().map(String::as_str)
    }

    pub fn tokens(&self) -> impl Iterator<Item = impl Iterator<Item = &str>> {
        self.lines.iter().map(|l| l.split(' '))
    }

    /// Drops a trailing payoff token such as `-1,1` from every line.
    pub fn strip_payoffs(&self) -> Corpus {
        let mut out = Corpus::new();
        for line in &self.lines {
            match line.rsplit_once(' ') {
                Some((head, last)) if is_payoff(last) => out.push_line(head),
                None if is_payoff(line) => {}
                _ => out.push_line(line),
            }
        }
        out
    }
}

fn is_payoff(token: &str) -> bool {
    token.split_once(',').is_some_and(|(a, b)| a.parse::<f64>().is_ok() && b.parse::<f64>().is_ok())
}

impl FromIterator<String> for Corpus {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        let mut c = Corpus::new();
        for line in iter {
            c.push_line(&line);
        }
        c
    }
}

/// Playthroughs per independently seeded shard.
pub const SHARD_SIZE: usize = 8192;

/// Payoff token `u1,u2`, integers printed without a fractional part.
pub fn payoff_token(u1: f64) -> String {
    // Adding 0.0 turns a negative zero into zero.
    format!("{},{}", u1 + 0.0, -u1 + 0.0)
}

/// Samples `n` playthroughs: the labels of every chance outcome and action
/// along the path, then the payoff token. Shard `s` draws from stream `s`
/// of a generator seeded with `seed`, so the output does not depend on
/// thread scheduling.
pub fn sample_playthroughs(game: &GameTree, profile: &BehavioralProfile, n: usize, seed: u64) -> Result<Corpus> {
    let counts = game.infoset_action_counts();
    let mut strategies = Vec::with_capacity(counts.len());
    for (key, &actions) in game.infoset_keys().iter().zip(&counts) {
        let name = key.to_string();
        let probs = profile.get(&name).ok_or(Error::MissingInfoset(name.clone()))?;
        if probs.len() != actions {
            return Err(Error::invalid(format!(
                "infoset `{name}` has {actions} actions, profile lists {}",
                probs.len()
            )));
        }
        strategies.push(probs.to_vec());
    }

    let shards: Vec<(usize, usize)> =
        (0..n).step_by(SHARD_SIZE).map(|s| (s / SHARD_SIZE, SHARD_SIZE.min(n - s))).collect();
    let lines: Vec<Vec<String>> = shards
        .par_iter()
        .map(|&(shard, size)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            (0..size).map(|_| playthrough(game, &strategies, &mut rng)).collect()
        })
        .collect();
    Ok(Corpus { lines: lines.into_iter().flatten().collect() })
}

fn playthrough(game: &GameTree, strategies: &[Vec<f64>], rng: &mut ChaCha8Rng) -> String {
    let mut line = String::new();
    let mut node = game.root();
    loop {
        let n = game.node(node);
        let edges = game.edges(node);
        let pick = match n.actor {
            Actor::Terminal => {
                line.push_str(&payoff_token(n.utility));
                return line;
            }
            Actor::Chance => sample_index(edges.iter().map(|e| e.prob), rng),
            Actor::Player(_) => {
                let i = n.infoset().expect("decision nodes carry an infoset");
                sample_index(strategies[i].iter().copied(), rng)
            }
        };
        line.push_str(game.edge_label(&edges[pick]));
        line.push(' ');
        node = edges[pick].child;
    }
}

fn sample_index(weights: impl Iterator<Item = f64> + Clone, rng: &mut ChaCha8Rng) -> usize {
    let mut target = rng.random::<f64>();
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            if target < w {
                return i;
            }
            last = i;
        }
        target -= w;
    }
    last
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for line in &corpus.lines {
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads any whitespace-tokenized text, one document per line.
pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let mut corpus = Corpus::new();
    for line in BufReader::new(File::open(path)?).lines() {
        corpus.push_line(&line?);
    }
    Ok(corpus)
}

/// Tokens with their counts and dense ids, most frequent first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    ids: HashMap<String, usize>,
    min_count: u64,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }
}

/// Keeps tokens seen at least `min_count` times. Ids follow descending
/// count, ties broken lexicographically.
pub fn build_vocab(corpus: &Corpus, min_count: u64) -> Result<Vocabulary> {
    if min_count == 0 {
        return Err(Error::invalid("min_count must be at least 1"));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for line in corpus.tokens() {
        for t in line {
            *counts.entry(t).or_default() += 1;
        }
    }
    let mut kept: Vec<(&str, u64)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let tokens: Vec<String> = kept.iter().map(|(t, _)| t.to_string()).collect();
    let ids = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary { tokens, counts: kept.iter().map(|&(_, c)| c).collect(), ids, min_count })
}
