use std::collections::HashMap;
use std::path::PathBuf;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{EmbeddingSource, ExperimentConfig};
use crate::abstraction::{
    abstract_game, domain_tokens, embed_cluster_abstraction, game_domains, hand_bucketing_map,
    leduc_hand_bucketing_maps, lift_strategy, random_map, AbstractionMap, Method,
};
use crate::analysis::{emit_results, ExperimentRecord};
use crate::corpus::{read_corpus, sample_playthroughs};
use crate::efg::{size_metrics, GameTree, SizeMetrics};
use crate::embed::{fetch_embeddings, train_corpus, transport_for, EmbeddingCache, EmbeddingTable, Provenance};
use crate::error::{Error, Result};
use crate::games::GameSpec;
use crate::solver::{solve, BehavioralProfile, SequenceGame, SolveReport, SolverSettings, Variant};

/// Seed for one repetition of one cell. Hashing the cell coordinates keeps
/// existing cells stable when the grid grows.
pub fn cell_seed(base_seed: u64, method: Method, k1: usize, k2: Option<usize>, index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    h.update(method.as_str().as_bytes());
    h.update((k1 as u64).to_le_bytes());
    h.update((k2.map_or(u64::MAX, |k| k as u64)).to_le_bytes());
    h.update((index as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Abstraction maps for one cell. Requested bucket counts above a domain's
/// size are clamped to it.
pub fn build_maps(
    game: GameSpec,
    method: Method,
    k1: usize,
    k2: Option<usize>,
    seed: u64,
    table: Option<&EmbeddingTable>,
) -> Result<Vec<AbstractionMap>> {
    if method == Method::Identity {
        return game_domains(game).into_iter().map(|d| AbstractionMap::identity(d, domain_tokens(game, d)?)).collect();
    }
    if let (GameSpec::Leduc { num_ranks }, Method::HandBucketing) = (game, method) {
        return Ok(leduc_hand_bucketing_maps(num_ranks, k1, k2.unwrap_or(1))?.into());
    }
    let domains = game_domains(game);
    let ks = [Some(k1), k2];
    let mut maps = Vec::with_capacity(domains.len());
    for (i, domain) in domains.into_iter().enumerate() {
        let requested = ks[i].ok_or_else(|| Error::invalid(format!("no bucket count for `{domain}`")))?;
        let size = match (game, method) {
            // Kuhn hand buckets cover card ranks shared by both seats.
            (GameSpec::Kuhn { num_cards }, Method::HandBucketing) => num_cards as usize,
            _ => domain_tokens(game, domain)?.len(),
        };
        let k = requested.min(size);
        let domain_seed = seed.wrapping_add(i as u64);
        maps.push(match method {
            Method::Random => random_map(game, domain, k, domain_seed)?,
            Method::HandBucketing => hand_bucketing_map(game, domain, k)?,
            Method::Kmeans => {
                let table = table.ok_or_else(|| Error::invalid("k-means needs an embedding table"))?;
                embed_cluster_abstraction(table, game, domain, k, domain_seed)?
            }
            Method::Identity => unreachable!("handled above"),
        });
    }
    Ok(maps)
}

/// Outcome of solving one abstraction and lifting it back.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub metrics: SizeMetrics,
    pub abstract_profile: BehavioralProfile,
    pub lifted: BehavioralProfile,
    pub report: SolveReport,
    pub exploitability: f64,
}

/// Abstracts, solves, lifts and measures in the original game.
pub fn evaluate_abstraction(
    original: &SequenceGame<'_>,
    maps: &[AbstractionMap],
    settings: &SolverSettings,
) -> Result<Evaluation> {
    let abstract_tree = abstract_game(original.game, maps)?;
    let metrics = size_metrics(&abstract_tree)?;
    let (abstract_profile, report) = solve(&abstract_tree, settings)?;
    let lifted = lift_strategy(&abstract_profile, maps, original.game)?;
    let exploitability = original.exploitability(&lifted)?;
    Ok(Evaluation { metrics, abstract_profile, lifted, report, exploitability })
}

/// Resolves the configured embedding source, if any.
pub fn resolve_embeddings(cfg: &ExperimentConfig, game: &GameTree) -> Result<Option<EmbeddingTable>> {
    match &cfg.embeddings {
        EmbeddingSource::None => Ok(None),
        EmbeddingSource::File { path } => Ok(Some(EmbeddingTable::load(path)?)),
        EmbeddingSource::Train { corpus, profile, samples, sample_seed, profile_eps, glove } => {
            let corpus = match corpus {
                Some(path) => read_corpus(path)?,
                None => {
                    let profile = match profile {
                        Some(path) => BehavioralProfile::load(path)?,
                        None => {
                            let settings = SolverSettings {
                                variant: Variant::CfrPlus,
                                max_iterations: cfg.solver.max_iterations,
                                target_eps: *profile_eps,
                            };
                            solve(game, &settings)?.0
                        }
                    };
                    sample_playthroughs(game, &profile, *samples, *sample_seed)?
                }
            };
            Ok(Some(train_corpus(&corpus, glove)?.0))
        }
        EmbeddingSource::Remote { provider, cache_dir, live } => {
            let mut cache = match cache_dir {
                Some(dir) => EmbeddingCache::open(dir)?,
                None => EmbeddingCache::in_memory(),
            };
            let texts: Vec<String> = game_domains(cfg.game)
                .into_iter()
                .map(|d| domain_tokens(cfg.game, d))
                .collect::<Result<Vec<_>>>()?
                .concat();
            let transport = transport_for(provider, *live);
            let table = fetch_embeddings(provider, &texts, &mut cache, transport.as_ref())?;
            debug_assert!(matches!(table.provenance(), Provenance::Remote(_)));
            Ok(Some(table))
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    method: Method,
    k1: usize,
    k2: Option<usize>,
    index: usize,
}

impl Cell {
    fn label(&self) -> String {
        match self.k2 {
            Some(k2) => format!("{} k1={} k2={k2} seed={}", self.method, self.k1, self.index),
            None => format!("{} k={} seed={}", self.method, self.k1, self.index),
        }
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    original: &SequenceGame<'_>,
    table: Option<&EmbeddingTable>,
    cell: Cell,
) -> Result<ExperimentRecord> {
    let seed = cell_seed(cfg.base_seed, cell.method, cell.k1, cell.k2, cell.index);
    let maps = build_maps(cfg.game, cell.method, cell.k1, cell.k2, seed, table)?;
    let eval = evaluate_abstraction(original, &maps, &cfg.solver)?;
    Ok(ExperimentRecord {
        game: cfg.game.to_string(),
        method: cell.method,
        k1: cell.k1,
        k2: cell.k2,
        seed: cell.index as u64,
        num_sequences: eval.metrics.num_sequences,
        nnz: eval.metrics.nnz,
        exploitability: eval.exploitability,
    })
}

/// Runs every cell of the grid once per seed index and returns the records
/// sorted by `(method, k1, k2, seed)`. Deterministic methods are solved once
/// per cell and the record is repeated for each seed index.
///
/// When `output_dir` is set, writes the embedding table (if any),
/// `results.csv` and `results_summary.csv` there.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    let game = cfg.game.build()?;
    let original = SequenceGame::new(&game)?;
    let table = if cfg.methods.contains(&Method::Kmeans) { resolve_embeddings(cfg, &game)? } else { None };

    let mut cells = Vec::new();
    for &method in &cfg.methods {
        let repeats = if matches!(method, Method::Random | Method::Kmeans) { cfg.seeds } else { 1 };
        for &(k1, k2) in &cfg.grid() {
            cells.extend((0..repeats).map(|index| Cell { method, k1, k2, index }));
        }
    }

    let work = || -> Result<Vec<ExperimentRecord>> {
        cells
            .par_iter()
            .map(|&cell| {
                run_cell(cfg, &original, table.as_ref(), cell)
                    .map_err(|e| Error::Cell { cell: cell.label(), source: Box::new(e) })
            })
            .collect()
    };
    let solved = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };

    let mut records = Vec::with_capacity(solved.len() * cfg.seeds);
    for r in solved {
        if matches!(r.method, Method::Random | Method::Kmeans) {
            records.push(r);
        } else {
            records.extend((0..cfg.seeds as u64).map(|seed| ExperimentRecord { seed, ..r.clone() }));
        }
    }
    records.sort_by_key(|r| (r.method, r.k1, r.k2, r.seed));

    if let Some(dir) = &cfg.output_dir {
        std::fs::create_dir_all(dir)?;
        if let Some(t) = &table {
            t.save(&dir.join("embeddings.jsonl"))?;
        }
        emit_results(&records, &results_path(dir))?;
    }
    Ok(records)
}

pub fn results_path(dir: &std::path::Path) -> PathBuf {
    dir.join("results.csv")
}

/// Groups records by `(method, k1, k2)` and averages exploitability.
pub fn mean_by_cell(records: &[ExperimentRecord]) -> HashMap<(Method, usize, Option<usize>), f64> {
    let mut acc: HashMap<_, (f64, usize)> = HashMap::new();
    for r in records {
        let e = acc.entry((r.method, r.k1, r.k2)).or_default();
        e.0 += r.exploitability;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}
