use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::table::{EmbeddingTable, Provenance};
use crate::corpus::{build_vocab, Corpus, Vocabulary};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GloveParams {
    pub vector_size: usize,
    pub max_iter: usize,
    pub window_size: usize,
    pub x_max: f64,
    pub alpha: f64,
    pub eta: f64,
    pub seed: u64,
    pub min_count: u64,
}

impl Default for GloveParams {
    fn default() -> Self {
        Self {
            vector_size: 50,
            max_iter: 100,
            window_size: 10,
            x_max: 10.0,
            alpha: 0.75,
            eta: 0.075,
            seed: 42,
            min_count: 20,
        }
    }
}

impl GloveParams {
    pub fn validate(&self) -> Result<()> {
        if self.vector_size == 0 || self.max_iter == 0 || self.window_size == 0 || self.min_count == 0 {
            return Err(Error::invalid("GloVe sizes and counts must be positive"));
        }
        if !(self.x_max > 0.0 && self.eta > 0.0 && self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid("GloVe needs x_max > 0, eta > 0 and alpha in (0, 1]"));
        }
        Ok(())
    }

    /// Weight of a co-occurrence count in the objective.
    pub fn weight(&self, x: f64) -> f64 {
        if x < self.x_max {
            (x / self.x_max).powf(self.alpha)
        } else {
            1.0
        }
    }
}

/// Symmetric co-occurrence weights over a vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct CoocTable {
    tokens: Vec<String>,
    /// `(i, j, X_ij)`, sorted, both orientations stored.
    entries: Vec<(u32, u32, f64)>,
}

impl CoocTable {
    pub fn from_entries(tokens: Vec<String>, mut entries: Vec<(u32, u32, f64)>) -> Result<Self> {
        let n = tokens.len() as u32;
        if let Some(&(i, j, x)) = entries.iter().find(|&&(i, j, x)| i >= n || j >= n || !(x > 0.0) || !x.is_finite()) {
            return Err(Error::invalid(format!("bad co-occurrence entry ({i}, {j}, {x})")));
        }
        entries.sort_by_key(|e| (e.0, e.1));
        Ok(Self { tokens, entries })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, a: &str, b: &str) -> f64 {
        let id = |t: &str| self.tokens.iter().position(|x| x == t).map(|i| i as u32);
        match (id(a), id(b)) {
            (Some(i), Some(j)) => {
                self.entries.binary_search_by(|e| (e.0, e.1).cmp(&(i, j))).map_or(0.0, |k| self.entries[k].2)
            }
            _ => 0.0,
        }
    }
}

/// Adds `1/d` in both directions for every in-vocabulary pair at distance
/// `d <= window_size` on the same line.
pub fn build_cooccurrence(corpus: &Corpus, vocab: &Vocabulary, window_size: usize) -> CoocTable {
    let mut cells: HashMap<(u32, u32), f64> = HashMap::new();
    let mut ids: Vec<Option<u32>> = Vec::new();
    for line in corpus.tokens() {
        ids.clear();
        ids.extend(line.map(|t| vocab.id(t).map(|i| i as u32)));
        for (t, a) in ids.iter().enumerate() {
            let Some(a) = *a else { continue };
            for d in 1..=window_size {
                let Some(Some(b)) = ids.get(t + d) else { continue };
                let w = 1.0 / d as f64;
                *cells.entry((a, *b)).or_default() += w;
                *cells.entry((*b, a)).or_default() += w;
            }
        }
    }
    let entries = cells.into_iter().map(|((i, j), x)| (i, j, x)).collect();
    CoocTable::from_entries(vocab.tokens().to_vec(), entries).expect("accumulated weights are positive")
}

/// Main and context vectors with biases.
#[derive(Clone, Debug, PartialEq)]
pub struct GloveModel {
    dim: usize,
    w: Vec<f64>,
    wt: Vec<f64>,
    b: Vec<f64>,
    bt: Vec<f64>,
    /// Objective after each training iteration.
    pub losses: Vec<f64>,
}

impl GloveModel {
    pub fn init(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = 0.5 / dim as f64;
        let mut draw = |n: usize| (0..n).map(|_| rng.random_range(-half..half)).collect::<Vec<f64>>();
        let w = draw(vocab_size * dim);
        let wt = draw(vocab_size * dim);
        let b = draw(vocab_size);
        let bt = draw(vocab_size);
        Self { dim, w, wt, b, bt, losses: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn main_vector(&self, i: usize) -> &[f64] {
        &self.w[i * self.dim..(i + 1) * self.dim]
    }

    pub fn context_vector(&self, i: usize) -> &[f64] {
        &self.wt[i * self.dim..(i + 1) * self.dim]
    }

    fn residual(&self, i: usize, j: usize, x: f64) -> f64 {
        let dot: f64 = self.main_vector(i).iter().zip(self.context_vector(j)).map(|(a, b)| a * b).sum();
        dot + self.b[i] + self.bt[j] - x.ln()
    }

    /// `w + w~` for every token of `cooc`.
    pub fn embeddings(&self, cooc: &CoocTable) -> Result<EmbeddingTable> {
        let mut table = EmbeddingTable::new(self.dim, Provenance::Trained);
        for (i, token) in cooc.tokens().iter().enumerate() {
            let v = self.main_vector(i).iter().zip(self.context_vector(i)).map(|(a, b)| a + b).collect();
            table.insert(token.clone(), v)?;
        }
        Ok(table)
    }
}

/// Weighted least-squares objective, without a factor of one half.
pub fn glove_loss(cooc: &CoocTable, model: &GloveModel, params: &GloveParams) -> f64 {
    cooc.entries
        .iter()
        .map(|&(i, j, x)| {
            let r = model.residual(i as usize, j as usize, x);
            params.weight(x) * r * r
        })
        .sum()
}

/// Fits a model with AdaGrad, visiting the entries in one seeded shuffled
/// order every iteration.
pub fn fit_glove(cooc: &CoocTable, params: &GloveParams) -> Result<GloveModel> {
    params.validate()?;
    if cooc.is_empty() {
        return Err(Error::invalid("empty co-occurrence table"));
    }
    let d = params.vector_size;
    let mut m = GloveModel::init(cooc.tokens.len(), d, params.seed);
    let mut gw = vec![1.0f64; m.w.len()];
    let mut gwt = vec![1.0f64; m.wt.len()];
    let mut gb = vec![1.0f64; m.b.len()];
    let mut gbt = vec![1.0f64; m.bt.len()];

    let mut order: Vec<usize> = (0..cooc.entries.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x9e37_79b9_7f4a_7c15);
    order.shuffle(&mut rng);

    for iter in 1..=params.max_iter {
        for &e in &order {
            let (i, j, x) = cooc.entries[e];
            let (i, j) = (i as usize, j as usize);
            let step = params.eta * params.weight(x) * m.residual(i, j, x);
            for k in 0..d {
                let (a, c) = (i * d + k, j * d + k);
                let g_main = step * m.wt[c];
                let g_ctx = step * m.w[a];
                m.w[a] -= g_main / gw[a].sqrt();
                m.wt[c] -= g_ctx / gwt[c].sqrt();
                gw[a] += g_main * g_main;
                gwt[c] += g_ctx * g_ctx;
            }
            m.b[i] -= step / gb[i].sqrt();
            m.bt[j] -= step / gbt[j].sqrt();
            gb[i] += step * step;
            gbt[j] += step * step;
        }
        let loss = glove_loss(cooc, &m, params);
        if !loss.is_finite() {
            return Err(Error::Diverged(iter));
        }
        m.losses.push(loss);
    }
    Ok(m)
}

pub fn train_glove(cooc: &CoocTable, params: &GloveParams) -> Result<EmbeddingTable> {
    fit_glove(cooc, params)?.embeddings(cooc)
}

/// Vocabulary, co-occurrence and training in one call.
pub fn train_corpus(corpus: &Corpus, params: &GloveParams) -> Result<(EmbeddingTable, GloveModel)> {
    params.validate()?;
    let vocab = build_vocab(corpus, params.min_count)?;
    let cooc = build_cooccurrence(corpus, &vocab, params.window_size);
    let model = fit_glove(&cooc, params)?;
    Ok((model.embeddings(&cooc)?, model))
}
