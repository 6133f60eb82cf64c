use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abstraction::Method;
use crate::embed::{GloveParams, ProviderConfig};
use crate::error::{Error, Result};
use crate::games::GameSpec;
use crate::solver::SolverSettings;

/// Where k-means gets its vectors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum EmbeddingSource {
    /// GloVe on a corpus file, or on playthroughs sampled from a profile.
    /// Without a profile file the game is solved to `profile_eps` first.
    Train {
        #[serde(default)]
        corpus: Option<PathBuf>,
        #[serde(default)]
        profile: Option<PathBuf>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        sample_seed: u64,
        #[serde(default = "default_profile_eps")]
        profile_eps: f64,
        #[serde(default)]
        glove: GloveParams,
    },
    /// A text-embedding provider, queried with the game's observation texts.
    /// Network calls happen only with `live: true`; otherwise the cache must
    /// already hold every text (the mock provider never needs the network).
    Remote {
        provider: ProviderConfig,
        #[serde(default)]
        cache_dir: Option<PathBuf>,
        #[serde(default)]
        live: bool,
    },
    File {
        path: PathBuf,
    },
    /// Baselines only.
    #[default]
    None,
}

fn default_samples() -> usize {
    1_000_000
}

fn default_profile_eps() -> f64 {
    1e-5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(serialize_with = "spec_to_str", deserialize_with = "spec_from_str")]
    pub game: GameSpec,
    #[serde(default)]
    pub embeddings: EmbeddingSource,
    pub methods: Vec<Method>,
    /// Bucket counts for Kuhn.
    #[serde(default)]
    pub k: Vec<usize>,
    /// Preflop and flop bucket counts for Leduc; the grid is their product.
    #[serde(default)]
    pub k1: Vec<usize>,
    #[serde(default)]
    pub k2: Vec<usize>,
    /// Repetitions per cell.
    #[serde(default = "one")]
    pub seeds: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn one() -> usize {
    1
}

fn spec_to_str<S: Serializer>(spec: &GameSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(spec)
}

fn spec_from_str<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<GameSpec, D::Error> {
    let text = String::deserialize(d)?;
    text.parse().map_err(serde::de::Error::custom)
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods to run"));
        }
        if self.seeds == 0 {
            return Err(Error::invalid("seeds must be at least 1"));
        }
        let positive = |v: &[usize], name: &str| {
            if v.is_empty() || v.contains(&0) {
                Err(Error::invalid(format!("`{name}` must be a non-empty list of positive values")))
            } else {
                Ok(())
            }
        };
        match self.game {
            GameSpec::Kuhn { .. } => {
                positive(&self.k, "k")?;
                if !self.k1.is_empty() || !self.k2.is_empty() {
                    return Err(Error::invalid("Kuhn grids take `k`, not `k1`/`k2`"));
                }
            }
            GameSpec::Leduc { .. } => {
                positive(&self.k1, "k1")?;
                positive(&self.k2, "k2")?;
                if !self.k.is_empty() {
                    return Err(Error::invalid("Leduc grids take `k1` and `k2`, not `k`"));
                }
            }
        }
        if self.methods.contains(&Method::Kmeans) && self.embeddings == EmbeddingSource::None {
            return Err(Error::invalid("k-means needs an embedding source"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be at least 1"));
        }
        Ok(())
    }

    /// Every `(k1, k2)` cell; `k2` is `None` for Kuhn.
    pub fn grid(&self) -> Vec<(usize, Option<usize>)> {
        match self.game {
            GameSpec::Kuhn { .. } => self.k.iter().map(|&k| (k, None)).collect(),
            GameSpec::Leduc { .. } => {
                self.k1.iter().flat_map(|&a| self.k2.iter().map(move |&b| (a, Some(b)))).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_json() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"game": "leduc:13", "methods": ["hand_bucketing"], "k1": [1, 2], "k2": [4]}"#)
                .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.game, GameSpec::Leduc { num_ranks: 13 });
        assert_eq!(cfg.grid(), vec![(1, Some(4)), (2, Some(4))]);
        assert_eq!(cfg.seeds, 1);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_mismatched_grids() {
        let parse = |s: &str| serde_json::from_str::<ExperimentConfig>(s).unwrap().validate();
        assert!(parse(r#"{"game": "kuhn:8", "methods": ["random"], "k1": [1], "k": [1]}"#).is_err());
        assert!(parse(r#"{"game": "kuhn:8", "methods": ["random"], "k": [0]}"#).is_err());
        assert!(parse(r#"{"game": "kuhn:8", "methods": ["kmeans"], "k": [2]}"#).is_err());
        assert!(parse(r#"{"game": "kuhn:8", "methods": ["random"], "k": [2], "seeds": 0}"#).is_err());
        assert!(parse(r#"{"game": "kuhn:8", "methods": ["random"], "k": [2]}"#).is_ok());
    }

    #[test]
    fn embedding_sources_parse() {
        let src: EmbeddingSource = serde_json::from_str(r#"{"source": "train", "samples": 10}"#).unwrap();
        assert!(matches!(src, EmbeddingSource::Train { samples: 10, .. }));
        let src: EmbeddingSource = serde_json::from_str(
            r#"{"source": "remote", "provider": {"provider": "mock", "endpoint": "", "model": "m",
               "api_key_env": "X", "batch_size": 8, "max_retries": 1, "timeout_secs": 1}}"#,
        )
        .unwrap();
        assert!(matches!(src, EmbeddingSource::Remote { live: false, .. }));
    }
}
