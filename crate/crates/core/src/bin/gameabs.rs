use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gameabs::abstraction::{lift_strategy, load_maps, save_maps, Method};
use gameabs::analysis::{knn, pca2, write_records, ExperimentRecord, Metric};
use gameabs::corpus::{read_corpus, sample_playthroughs, write_corpus};
use gameabs::embed::{
    fetch_embeddings, hand_text_vocabulary, train_corpus, transport_for, EmbeddingCache, EmbeddingTable, GloveParams,
    HandTextKind, ProviderConfig, ProviderKind,
};
use gameabs::experiment::{build_maps, evaluate_abstraction, run_experiment, ExperimentConfig};
use gameabs::games::GameSpec;
use gameabs::solver::{solve, BehavioralProfile, SequenceGame, SolverSettings, Variant};
use gameabs::{abstraction, efg, Result};

#[derive(Parser)]
#[command(name = "gameabs", version, about = "Game abstraction from action embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SolverArgs {
    #[arg(long, default_value = "cfr_plus", value_parser = parse_from_str::<Variant>)]
    variant: Variant,
    #[arg(long, default_value_t = 1e-6)]
    target_eps: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
}

impl SolverArgs {
    fn settings(self) -> SolverSettings {
        SolverSettings { variant: self.variant, target_eps: self.target_eps, max_iterations: self.max_iterations }
    }
}

fn parse_from_str<T: std::str::FromStr<Err = gameabs::Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: gameabs::Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game and write the average strategy (`.gz` paths are compressed).
    Solve {
        #[arg(long, value_parser = parse_from_str::<GameSpec>)]
        game: GameSpec,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample self-play playthroughs into a corpus file.
    Sample {
        #[arg(long, value_parser = parse_from_str::<GameSpec>)]
        game: GameSpec,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train GloVe embeddings on a whitespace-tokenized corpus.
    TrainEmbed {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long, default_value_t = 20)]
        min_count: u64,
        #[arg(long, default_value_t = 10.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.75)]
        alpha: f64,
        #[arg(long, default_value_t = 0.075)]
        eta: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Drop trailing payoff tokens before training.
        #[arg(long)]
        strip_payoffs: bool,
    },
    /// Embed observation texts with a provider model.
    FetchEmbed {
        #[arg(long, value_parser = parse_from_str::<ProviderKind>)]
        provider: ProviderKind,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        endpoint: Option<String>,
        /// Embed every observation of this game.
        #[arg(long, value_parser = parse_from_str::<GameSpec>, conflicts_with = "vocab")]
        game: Option<GameSpec>,
        /// Embed a card-text vocabulary: leduc_preflop, leduc_flop or holdem_two_card.
        #[arg(long, value_parser = parse_from_str::<HandTextKind>)]
        vocab: Option<HandTextKind>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Allow network calls to the provider; otherwise only cached texts are served.
        #[arg(long)]
        live: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Nearest neighbours of one token.
    Knn {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(short, default_value_t = 7)]
        k: usize,
        /// Defaults to cosine for provider tables and Euclidean otherwise.
        #[arg(long, value_parser = parse_from_str::<Metric>)]
        metric: Option<Metric>,
    },
    /// Project tokens onto two principal components and write token,x,y.
    Pca {
        #[arg(long)]
        embeddings: PathBuf,
        /// Comma-separated tokens; all tokens when omitted.
        #[arg(long, value_delimiter = ',')]
        tokens: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build abstraction maps for a game.
    Abstract {
        #[arg(long, value_parser = parse_from_str::<GameSpec>)]
        game: GameSpec,
        #[arg(long, value_parser = parse_from_str::<Method>)]
        method: Method,
        #[arg(long, default_value_t = 1)]
        k1: usize,
        /// Flop bucket count (Leduc only).
        #[arg(long)]
        k2: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve (or load) an abstract strategy, lift it and report its exploitability.
    Evaluate {
        #[arg(long, value_parser = parse_from_str::<GameSpec>)]
        game: GameSpec,
        #[arg(long)]
        maps: PathBuf,
        /// Abstract strategy to lift instead of solving the abstract game.
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run an experiment grid from a JSON config and write results CSVs.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { game, solver, out } => {
            let tree = game.build()?;
            let (profile, report) = solve(&tree, &solver.settings())?;
            profile.save(&out)?;
            let value = SequenceGame::new(&tree)?.value(&profile)?;
            print_json(&json!({
                "game": game.to_string(),
                "iterations": report.iterations,
                "exploitability": report.exploitability,
                "value": value,
                "seconds": report.wall_time.as_secs_f64(),
            }));
        }
        Command::Sample { game, strategy, n, seed, out } => {
            let tree = game.build()?;
            let corpus = sample_playthroughs(&tree, &BehavioralProfile::load(&strategy)?, n, seed)?;
            write_corpus(&corpus, &out)?;
            eprintln!("wrote {} lines to {}", corpus.len(), out.display());
        }
        Command::TrainEmbed {
            corpus,
            out,
            dim,
            iterations,
            window,
            min_count,
            x_max,
            alpha,
            eta,
            seed,
            strip_payoffs,
        } => {
            let mut corpus = read_corpus(&corpus)?;
            if strip_payoffs {
                corpus = corpus.strip_payoffs();
            }
            let params = GloveParams {
                vector_size: dim,
                max_iter: iterations,
                window_size: window,
                x_max,
                alpha,
                eta,
                seed,
                min_count,
            };
            let (table, model) = train_corpus(&corpus, &params)?;
            table.save(&out)?;
            print_json(&json!({
                "tokens": table.len(),
                "dim": table.dim(),
                "initial_loss": model.losses.first(),
                "final_loss": model.losses.last(),
            }));
        }
        Command::FetchEmbed { provider, model, endpoint, game, vocab, cache_dir, live, out } => {
            let mut cfg = ProviderConfig::for_provider(provider);
            if let Some(m) = model {
                cfg.model = m;
            }
            if let Some(e) = endpoint {
                cfg.endpoint = e;
            }
            let texts = match (game, vocab) {
                (Some(g), _) => abstraction::game_domains(g)
                    .into_iter()
                    .map(|d| abstraction::domain_tokens(g, d))
                    .collect::<Result<Vec<_>>>()?
                    .concat(),
                (None, Some(kind)) => hand_text_vocabulary(kind),
                (None, None) => return Err(gameabs::Error::InvalidArgument("pass --game or --vocab".into())),
            };
            let mut cache = match cache_dir {
                Some(dir) => EmbeddingCache::open(&dir)?,
                None => EmbeddingCache::in_memory(),
            };
            let table = fetch_embeddings(&cfg, &texts, &mut cache, transport_for(&cfg, live).as_ref())?;
            table.save(&out)?;
            eprintln!("wrote {} vectors of dimension {} to {}", table.len(), table.dim(), out.display());
        }
        Command::Knn { embeddings, query, k, metric } => {
            let table = EmbeddingTable::load(&embeddings)?;
            let metric = metric.unwrap_or_else(|| Metric::default_for(table.provenance()));
            let list = knn(&table, &query, k, metric)?;
            println!("token,{metric}");
            for (token, d) in list.neighbors {
                println!("{token},{d}");
            }
        }
        Command::Pca { embeddings, tokens, out } => {
            let table = EmbeddingTable::load(&embeddings)?;
            let subset = if tokens.is_empty() { table.tokens().map(str::to_owned).collect() } else { tokens };
            let proj = pca2(&table, &subset)?;
            proj.write_csv(&out)?;
            print_json(&json!({ "points": subset.len(), "explained_variance": proj.explained }));
        }
        Command::Abstract { game, method, k1, k2, seed, embeddings, out } => {
            let table = embeddings.as_deref().map(EmbeddingTable::load).transpose()?;
            let k2 = match game {
                GameSpec::Leduc { .. } => Some(k2.unwrap_or(1)),
                GameSpec::Kuhn { .. } => None,
            };
            let maps = build_maps(game, method, k1, k2, seed, table.as_ref())?;
            save_maps(&maps, &out)?;
            let buckets: Vec<_> =
                maps.iter().map(|m| json!({"domain": m.domain().to_string(), "buckets": m.num_buckets()})).collect();
            print_json(&json!(buckets));
        }
        Command::Evaluate { game, maps, strategy, solver } => {
            let tree = game.build()?;
            let original = SequenceGame::new(&tree)?;
            let maps = load_maps(&maps)?;
            let (metrics, eps) = match strategy {
                Some(path) => {
                    let abstract_tree = abstraction::abstract_game(&tree, &maps)?;
                    let lifted = lift_strategy(&BehavioralProfile::load(&path)?, &maps, &tree)?;
                    (efg::size_metrics(&abstract_tree)?, original.exploitability(&lifted)?)
                }
                None => {
                    let e = evaluate_abstraction(&original, &maps, &solver.settings())?;
                    (e.metrics, e.exploitability)
                }
            };
            let first = maps.first().ok_or_else(|| gameabs::Error::InvalidArgument("no maps in file".into()))?;
            let record = ExperimentRecord {
                game: game.to_string(),
                method: first.method(),
                k1: first.k(),
                k2: maps.get(1).map(|m| m.k()),
                seed: first.seed().unwrap_or(0),
                num_sequences: metrics.num_sequences,
                nnz: metrics.nnz,
                exploitability: eps,
            };
            print_json(&serde_json::to_value(&record)?);
        }
        Command::Experiment { config, out_dir, threads } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if out_dir.is_some() {
                cfg.output_dir = out_dir;
            }
            if threads.is_some() {
                cfg.threads = threads;
            }
            let records = run_experiment(&cfg)?;
            if cfg.output_dir.is_none() {
                write_records(&records, std::io::stdout().lock())?;
            } else {
                eprintln!(
                    "wrote {} records to {}",
                    records.len(),
                    cfg.output_dir.as_deref().unwrap_or(Path::new(".")).display()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
