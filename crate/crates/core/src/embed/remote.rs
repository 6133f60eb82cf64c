use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::table::{EmbeddingTable, Provenance};
use crate::error::{Error, Result};
use crate::games::{card_text, leduc_deck, Card, Suit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    OpenAi,
    Gemini,
    /// Offline provider: hash-derived vectors in the OpenAI wire format.
    Mock,
}

impl ProviderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::OpenAi => "openai",
            ProviderKind::Gemini => "gemini",
            ProviderKind::Mock => "mock",
        }
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProviderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "openai" => Ok(ProviderKind::OpenAi),
            "gemini" | "google" => Ok(ProviderKind::Gemini),
            "mock" => Ok(ProviderKind::Mock),
            other => Err(Error::invalid(format!("unknown provider `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider: ProviderKind,
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub batch_size: usize,
    pub max_retries: usize,
    pub timeout_secs: u64,
    /// First retry delay; doubles on every further attempt.
    #[serde(default = "default_backoff")]
    pub backoff_ms: u64,
}

fn default_backoff() -> u64 {
    500
}

/// Dimension of vectors served by the mock provider.
pub const MOCK_DIM: usize = 16;

impl ProviderConfig {
    pub fn openai() -> Self {
        Self {
            provider: ProviderKind::OpenAi,
            endpoint: "https://api.openai.com/v1/embeddings".into(),
            model: "text-embedding-3-small".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            batch_size: 256,
            max_retries: 5,
            timeout_secs: 60,
            backoff_ms: default_backoff(),
        }
    }

    pub fn gemini() -> Self {
        Self {
            provider: ProviderKind::Gemini,
            endpoint: "https://generativelanguage.googleapis.com/v1beta".into(),
            model: "gemini-embedding-001".into(),
            api_key_env: "GEMINI_API_KEY".into(),
            batch_size: 100,
            max_retries: 5,
            timeout_secs: 60,
            backoff_ms: default_backoff(),
        }
    }

    pub fn mock() -> Self {
        Self {
            provider: ProviderKind::Mock,
            endpoint: "mock://embeddings".into(),
            model: "mock-hash".into(),
            api_key_env: "MOCK_API_KEY".into(),
            batch_size: 64,
            max_retries: 3,
            timeout_secs: 1,
            backoff_ms: 0,
        }
    }

    pub fn for_provider(kind: ProviderKind) -> Self {
        match kind {
            ProviderKind::OpenAi => Self::openai(),
            ProviderKind::Gemini => Self::gemini(),
            ProviderKind::Mock => Self::mock(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        if self.model.is_empty() {
            return Err(Error::invalid("model identifier must not be empty"));
        }
        Ok(())
    }

    fn needs_key(&self) -> bool {
        self.provider != ProviderKind::Mock
    }
}

/// One HTTP POST with a JSON body.
#[derive(Clone, Debug, PartialEq)]
pub struct HttpRequest {
    pub url: String,
    pub headers: Vec<(String, String)>,
    pub body: Value,
}

/// Sends requests; failures are retried by the caller.
pub trait Transport {
    fn post(&self, request: &HttpRequest, timeout: Duration) -> std::result::Result<Value, String>;
}

/// Blocking HTTP transport.
#[derive(Debug, Default)]
pub struct HttpTransport;

impl Transport for HttpTransport {
    fn post(&self, request: &HttpRequest, timeout: Duration) -> std::result::Result<Value, String> {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        let mut req = agent.post(&request.url);
        for (k, v) in &request.headers {
            req = req.header(k, v);
        }
        let mut resp = req.send_json(&request.body).map_err(|e| e.to_string())?;
        resp.body_mut().read_json::<Value>().map_err(|e| e.to_string())
    }
}

/// Answers OpenAI-format requests with vectors derived from a hash of each
/// input text. Never touches the network.
#[derive(Debug, Default)]
pub struct HashTransport;

impl HashTransport {
    pub fn vector(text: &str) -> Vec<f64> {
        let digest = Sha256::digest(text.as_bytes());
        digest.chunks(2).take(MOCK_DIM).map(|c| f64::from(u16::from_le_bytes([c[0], c[1]])) / 65535.0 - 0.5).collect()
    }
}

impl Transport for HashTransport {
    fn post(&self, request: &HttpRequest, _: Duration) -> std::result::Result<Value, String> {
        let inputs = request.body["input"].as_array().ok_or("request has no `input` array")?;
        let data: Vec<Value> = inputs
            .iter()
            .enumerate()
            .map(|(i, t)| json!({"index": i, "embedding": Self::vector(t.as_str().unwrap_or_default())}))
            .collect();
        Ok(json!({ "data": data }))
    }
}

/// Refuses every request, so only cached texts can be served.
#[derive(Debug, Default)]
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn post(&self, request: &HttpRequest, _: Duration) -> std::result::Result<Value, String> {
        Err(format!("live provider calls are disabled (would POST to {})", request.url))
    }
}

/// Picks the transport for a configuration: hashing for the mock provider,
/// HTTP when `live`, and [`OfflineTransport`] otherwise.
pub fn transport_for(cfg: &ProviderConfig, live: bool) -> Box<dyn Transport> {
    match cfg.provider {
        ProviderKind::Mock => Box::new(HashTransport),
        _ if live => Box::new(HttpTransport),
        _ => Box::new(OfflineTransport),
    }
}

/// Maps texts to a provider request body.
pub fn build_request(cfg: &ProviderConfig, texts: &[String], api_key: &str) -> HttpRequest {
    match cfg.provider {
        ProviderKind::OpenAi | ProviderKind::Mock => HttpRequest {
            url: cfg.endpoint.clone(),
            headers: vec![("Authorization".into(), format!("Bearer {api_key}"))],
            body: json!({ "model": cfg.model, "input": texts }),
        },
        ProviderKind::Gemini => {
            let model = format!("models/{}", cfg.model);
            let requests: Vec<Value> =
                texts.iter().map(|t| json!({ "model": model, "content": { "parts": [{ "text": t }] } })).collect();
            HttpRequest {
                url: format!("{}/{model}:batchEmbedContents", cfg.endpoint.trim_end_matches('/')),
                headers: vec![("x-goog-api-key".into(), api_key.to_owned())],
                body: json!({ "requests": requests }),
            }
        }
    }
}

fn as_vector(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(Value::as_f64).collect()
}

/// Extracts one vector per requested text, in request order.
pub fn parse_response(cfg: &ProviderConfig, body: &Value, expected: usize) -> Result<Vec<Vec<f64>>> {
    let bad = |what: &str| Error::Provider { attempts: 1, msg: format!("malformed {} response: {what}", cfg.provider) };
    let vectors: Vec<Vec<f64>> = match cfg.provider {
        ProviderKind::OpenAi | ProviderKind::Mock => {
            let mut items: Vec<(u64, Vec<f64>)> = body["data"]
                .as_array()
                .ok_or_else(|| bad("no `data` array"))?
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let index = d["index"].as_u64().unwrap_or(i as u64);
                    as_vector(&d["embedding"]).map(|v| (index, v)).ok_or_else(|| bad("bad `embedding`"))
                })
                .collect::<Result<_>>()?;
            items.sort_by_key(|(i, _)| *i);
            items.into_iter().map(|(_, v)| v).collect()
        }
        ProviderKind::Gemini => body["embeddings"]
            .as_array()
            .ok_or_else(|| bad("no `embeddings` array"))?
            .iter()
            .map(|e| as_vector(&e["values"]).ok_or_else(|| bad("bad `values`")))
            .collect::<Result<_>>()?,
    };
    if vectors.len() != expected {
        return Err(bad(&format!("{} vectors for {expected} texts", vectors.len())));
    }
    Ok(vectors)
}

/// Vectors keyed by exact text, persisted as one JSON-lines file per
/// (provider, model) under a directory.
#[derive(Debug)]
pub struct EmbeddingCache {
    dir: Option<PathBuf>,
    entries: HashMap<(String, String), HashMap<String, Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    text: String,
    vector: Vec<f64>,
}

impl EmbeddingCache {
    /// A cache that lives only in memory.
    pub fn in_memory() -> Self {
        Self { dir: None, entries: HashMap::new() }
    }

    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: Some(dir.to_owned()), entries: HashMap::new() })
    }

    fn file_for(dir: &Path, provider: &str, model: &str) -> PathBuf {
        let safe: String =
            model.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect();
        dir.join(format!("{provider}__{safe}.jsonl"))
    }

    fn bucket(&mut self, provider: &str, model: &str) -> Result<&mut HashMap<String, Vec<f64>>> {
        let key = (provider.to_owned(), model.to_owned());
        if !self.entries.contains_key(&key) {
            let mut loaded = HashMap::new();
            if let Some(dir) = &self.dir {
                let path = Self::file_for(dir, provider, model);
                if path.exists() {
                    for (n, line) in BufReader::new(File::open(&path)?).lines().enumerate() {
                        let line = line?;
                        if line.trim().is_empty() {
                            continue;
                        }
                        let entry: CacheLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
                            path: path.clone(),
                            line: n + 1,
                            msg: e.to_string(),
                        })?;
                        loaded.insert(entry.text, entry.vector);
                    }
                }
            }
            self.entries.insert(key.clone(), loaded);
        }
        Ok(self.entries.get_mut(&key).expect("inserted above"))
    }

    pub fn get(&mut self, provider: &str, model: &str, text: &str) -> Result<Option<Vec<f64>>> {
        Ok(self.bucket(provider, model)?.get(text).cloned())
    }

    /// Adds entries and rewrites the backing file through a rename.
    pub fn insert_all(&mut self, provider: &str, model: &str, new: Vec<(String, Vec<f64>)>) -> Result<()> {
        let dir = self.dir.clone();
        let bucket = self.bucket(provider, model)?;
        bucket.extend(new);
        if let Some(dir) = dir {
            let path = Self::file_for(&dir, provider, model);
            let tmp = path.with_extension("jsonl.tmp");
            let mut texts: Vec<&String> = bucket.keys().collect();
            texts.sort();
            let mut out = std::io::BufWriter::new(File::create(&tmp)?);
            for text in texts {
                serde_json::to_writer(&mut out, &CacheLine { text: text.clone(), vector: bucket[text].clone() })?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
            drop(out);
            fs::rename(&tmp, &path)?;
        }
        Ok(())
    }
}

fn with_retries(cfg: &ProviderConfig, transport: &dyn Transport, request: &HttpRequest) -> Result<Value> {
    let attempts = cfg.max_retries.max(1);
    let mut last = String::new();
    for attempt in 0..attempts {
        if attempt > 0 && cfg.backoff_ms > 0 {
            thread::sleep(Duration::from_millis(cfg.backoff_ms << (attempt - 1).min(16)));
        }
        match transport.post(request, Duration::from_secs(cfg.timeout_secs)) {
            Ok(v) => return Ok(v),
            Err(e) => last = e,
        }
    }
    Err(Error::Provider { attempts, msg: last })
}

/// Embeds every distinct text, serving cached entries first and fetching the
/// rest in batches.
pub fn fetch_embeddings(
    cfg: &ProviderConfig,
    texts: &[String],
    cache: &mut EmbeddingCache,
    transport: &dyn Transport,
) -> Result<EmbeddingTable> {
    cfg.validate()?;
    let provider = cfg.provider.as_str();
    let mut seen = HashSet::new();
    let unique: Vec<&String> = texts.iter().filter(|t| seen.insert(t.as_str())).collect();

    let mut found: Vec<(String, Vec<f64>)> = Vec::new();
    let mut missing: Vec<String> = Vec::new();
    for text in unique {
        match cache.get(provider, &cfg.model, text)? {
            Some(v) => found.push((text.clone(), v)),
            None => missing.push(text.clone()),
        }
    }

    if !missing.is_empty() {
        let key = if cfg.needs_key() {
            std::env::var(&cfg.api_key_env).map_err(|_| Error::MissingApiKey(cfg.api_key_env.clone()))?
        } else {
            String::new()
        };
        let mut fetched = Vec::with_capacity(missing.len());
        for batch in missing.chunks(cfg.batch_size) {
            let request = build_request(cfg, batch, &key);
            let body = with_retries(cfg, transport, &request)?;
            let vectors = parse_response(cfg, &body, batch.len())?;
            fetched.extend(batch.iter().cloned().zip(vectors));
        }
        if let Some(((_, first), rest)) = fetched.split_first() {
            if let Some((t, v)) = rest.iter().find(|(_, v)| v.len() != first.len()) {
                return Err(Error::invalid(format!(
                    "provider returned {} dimensions for `{t}` but {} elsewhere",
                    v.len(),
                    first.len()
                )));
            }
        }
        cache.insert_all(provider, &cfg.model, fetched.clone())?;
        found.extend(fetched);
    }

    let dim = found.first().map_or(0, |(_, v)| v.len());
    let mut table = EmbeddingTable::new(dim, Provenance::Remote(cfg.model.clone()));
    for (text, v) in found {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
        table.insert(text, v)?;
    }
    Ok(table)
}

/// Card-text vocabularies sent to providers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandTextKind {
    LeducPreflop,
    LeducFlop,
    HoldemTwoCard,
}

impl FromStr for HandTextKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "leduc_preflop" => Ok(HandTextKind::LeducPreflop),
            "leduc_flop" => Ok(HandTextKind::LeducFlop),
            "holdem_two_card" => Ok(HandTextKind::HoldemTwoCard),
            _ => Err(Error::invalid(format!("unknown hand vocabulary `{s}`"))),
        }
    }
}

pub fn hand_text_vocabulary(kind: HandTextKind) -> Vec<String> {
    let ordered_pairs = |deck: &[Card]| -> Vec<String> {
        deck.iter().flat_map(|a| deck.iter().filter(move |b| *b != a).map(move |b| format!("{a}{b}"))).collect()
    };
    match kind {
        HandTextKind::LeducPreflop => leduc_deck(13).iter().map(|c| c.to_string()).collect(),
        HandTextKind::LeducFlop => ordered_pairs(&leduc_deck(13)),
        HandTextKind::HoldemTwoCard => {
            let deck: Vec<Card> = (0..13).flat_map(|r| Suit::ALL.map(|s| Card::new(r, s))).collect();
            debug_assert!(deck.iter().all(|&c| card_text(c).is_ok()));
            ordered_pairs(&deck)
        }
    }
}
