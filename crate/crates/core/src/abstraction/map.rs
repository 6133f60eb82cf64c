use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::efg::{Domain, GameTree};
use crate::error::{Error, Result};
use crate::games::{kuhn_col_token, kuhn_row_token, leduc_deck, GameSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Kmeans,
    Random,
    HandBucketing,
    /// Every observation keeps its own label.
    Identity,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Kmeans => "kmeans",
            Method::Random => "random",
            Method::HandBucketing => "hand_bucketing",
            Method::Identity => "identity",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kmeans" => Ok(Method::Kmeans),
            "random" => Ok(Method::Random),
            "hand_bucketing" | "hand-bucketing" => Ok(Method::HandBucketing),
            "identity" => Ok(Method::Identity),
            other => Err(Error::invalid(format!("unknown abstraction method `{other}`"))),
        }
    }
}

/// The clustering domains of a game, in the order their maps are expected.
pub fn game_domains(game: GameSpec) -> Vec<Domain> {
    match game {
        GameSpec::Kuhn { .. } => vec![Domain::KuhnDeal],
        GameSpec::Leduc { .. } => vec![Domain::LeducPreflop, Domain::LeducFlop],
    }
}

/// Every observation token of `domain` in `game`, in canonical order.
///
/// Kuhn deals list all row-player tokens `c?` before the column-player
/// tokens `?c`. Leduc flop texts are hole card then public card.
pub fn domain_tokens(game: GameSpec, domain: Domain) -> Result<Vec<String>> {
    match (game, domain) {
        (GameSpec::Kuhn { num_cards }, Domain::KuhnDeal) => {
            Ok((0..num_cards).map(kuhn_row_token).chain((0..num_cards).map(kuhn_col_token)).collect())
        }
        (GameSpec::Leduc { num_ranks }, Domain::LeducPreflop) => {
            Ok(leduc_deck(num_ranks).iter().map(|c| c.to_string()).collect())
        }
        (GameSpec::Leduc { num_ranks }, Domain::LeducFlop) => {
            let deck = leduc_deck(num_ranks);
            Ok(deck.iter().flat_map(|h| deck.iter().filter(move |b| *b != h).map(move |b| format!("{h}{b}"))).collect())
        }
        _ => Err(Error::invalid(format!("{game} has no `{domain}` observations"))),
    }
}

/// Observation tokens that actually occur in the infoset keys of `game`,
/// grouped by domain.
pub fn observed_tokens(game: &GameTree) -> BTreeMap<Domain, Vec<String>> {
    let mut seen: BTreeMap<Domain, BTreeSet<String>> = BTreeMap::new();
    for key in game.infoset_keys() {
        for obs in &key.observations {
            seen.entry(obs.domain).or_default().insert(obs.token.clone());
        }
    }
    seen.into_iter().map(|(d, s)| (d, s.into_iter().collect())).collect()
}

/// Assignment of every observation of one domain to a bucket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapFile", into = "MapFile")]
pub struct AbstractionMap {
    domain: Domain,
    method: Method,
    k: usize,
    seed: Option<u64>,
    tokens: Vec<String>,
    assignment: Vec<usize>,
    num_buckets: usize,
    lookup: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct MapFile {
    domain: Domain,
    method: Method,
    k: usize,
    seed: Option<u64>,
    num_buckets: usize,
    tokens: Vec<String>,
    assignment: Vec<usize>,
}

impl From<AbstractionMap> for MapFile {
    fn from(m: AbstractionMap) -> Self {
        MapFile {
            domain: m.domain,
            method: m.method,
            k: m.k,
            seed: m.seed,
            num_buckets: m.num_buckets,
            tokens: m.tokens,
            assignment: m.assignment,
        }
    }
}

impl TryFrom<MapFile> for AbstractionMap {
    type Error = Error;

    fn try_from(f: MapFile) -> Result<Self> {
        let map = AbstractionMap::from_assignment(f.domain, f.method, f.k, f.seed, f.tokens, &f.assignment)?;
        if map.assignment != f.assignment || map.num_buckets != f.num_buckets {
            return Err(Error::invalid("abstraction map bucket ids are not dense"));
        }
        Ok(map)
    }
}

impl AbstractionMap {
    /// Builds a map from raw cluster ids, renumbering the non-empty clusters
    /// densely in increasing id order.
    pub fn from_assignment(
        domain: Domain,
        method: Method,
        k: usize,
        seed: Option<u64>,
        tokens: Vec<String>,
        raw: &[usize],
    ) -> Result<Self> {
        if tokens.len() != raw.len() {
            return Err(Error::DimensionMismatch { expected: tokens.len(), got: raw.len() });
        }
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if let Some(&bad) = raw.iter().find(|&&b| b >= k) {
            return Err(Error::invalid(format!("bucket {bad} out of range for k = {k}")));
        }
        let used: BTreeSet<usize> = raw.iter().copied().collect();
        let dense: HashMap<usize, usize> = used.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let assignment: Vec<usize> = raw.iter().map(|b| dense[b]).collect();
        let mut lookup = HashMap::with_capacity(tokens.len());
        for (t, &b) in tokens.iter().zip(&assignment) {
            if lookup.insert(t.clone(), b).is_some() {
                return Err(Error::invalid(format!("token `{t}` listed twice")));
            }
        }
        Ok(Self { domain, method, k, seed, tokens, assignment, num_buckets: used.len(), lookup })
    }

    /// Each token in its own bucket, keeping its original label.
    pub fn identity(domain: Domain, tokens: Vec<String>) -> Result<Self> {
        let raw: Vec<usize> = (0..tokens.len()).collect();
        Self::from_assignment(domain, Method::Identity, tokens.len().max(1), None, tokens, &raw)
    }

    /// Identity maps for every domain observed in `game`.
    pub fn identities_for(game: &GameTree) -> Result<Vec<Self>> {
        observed_tokens(game).into_iter().map(|(d, t)| Self::identity(d, t)).collect()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Number of buckets requested.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Buckets with at least one observation.
    pub fn num_buckets(&self) -> usize {
        self.num_buckets
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn bucket(&self, token: &str) -> Option<usize> {
        self.lookup.get(token).copied()
    }

    /// The label `token` carries in the abstract game.
    pub fn label(&self, token: &str) -> Option<String> {
        let b = self.bucket(token)?;
        Some(match self.method {
            Method::Identity => token.to_owned(),
            _ => format!("#{b}"),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Saves several maps as one JSON array.
pub fn save_maps(maps: &[AbstractionMap], path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(maps)?)?;
    Ok(())
}

/// Loads either a single map or an array of maps.
pub fn load_maps(path: &Path) -> Result<Vec<AbstractionMap>> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.is_array() {
        Ok(serde_json::from_value(value)?)
    } else {
        Ok(vec![serde_json::from_value(value)?])
    }
}
