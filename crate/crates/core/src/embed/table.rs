use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where an embedding table came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Trained,
    Remote(String),
    File,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Trained => f.write_str("trained"),
            Provenance::Remote(model) => write!(f, "remote:{model}"),
            Provenance::File => f.write_str("file"),
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trained" => Ok(Provenance::Trained),
            "file" => Ok(Provenance::File),
            _ => match s.strip_prefix("remote:") {
                Some(model) if !model.is_empty() => Ok(Provenance::Remote(model.to_owned())),
                _ => Err(Error::invalid(format!("unknown provenance `{s}`"))),
            },
        }
    }
}

/// Token to vector map with a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    provenance: Provenance,
    vectors: BTreeMap<String, Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    dim: usize,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct Entry<'a> {
    token: std::borrow::Cow<'a, str>,
    vector: std::borrow::Cow<'a, [f64]>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, provenance: Provenance) -> Self {
        Self { dim, provenance, vectors: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn set_provenance(&mut self, provenance: Provenance) {
        self.provenance = provenance;
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    /// Tokens in lexicographic order.
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn insert(&mut self, token: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let token = token.into();
        if vector.len() != self.dim {
            return Err(Error::invalid(format!(
                "vector for `{token}` has length {}, table dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("vector for `{token}` has a non-finite entry")));
        }
        self.vectors.insert(token, vector);
        Ok(())
    }

    /// Vectors for `tokens` in the given order, or the full list of missing tokens.
    pub fn lookup_all(&self, tokens: &[String]) -> Result<Vec<Vec<f64>>> {
        let missing: Vec<String> = tokens.iter().filter(|t| !self.contains(t)).cloned().collect();
        if !missing.is_empty() {
            return Err(Error::MissingTokens(missing));
        }
        Ok(tokens.iter().map(|t| self.vectors[t].clone()).collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let header = Header { dim: self.dim, provenance: self.provenance.to_string() };
        serde_json::to_writer(&mut *out, &header)?;
        out.write_all(b"\n")?;
        for (token, vector) in &self.vectors {
            let entry = Entry { token: token.into(), vector: vector.into() };
            serde_json::to_writer(&mut *out, &entry)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?), &path.display().to_string())
    }

    /// Parses the JSON-lines format; `source` names the input in errors.
    pub fn read_from<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let parse_err = |line: usize, msg: String| Error::Parse { path: source.into(), line, msg };
        let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let Some((n, header)) = lines.next() else {
            return Err(parse_err(1, "missing header line".into()));
        };
        let header: Header = serde_json::from_str(&header?).map_err(|e| parse_err(n, format!("bad header: {e}")))?;
        let provenance = header.provenance.parse().map_err(|e: Error| parse_err(n, e.to_string()))?;
        let mut table = Self::new(header.dim, provenance);
        for (n, line) in lines {
            let line = line?;
            let entry: Entry<'_> = serde_json::from_str(&line).map_err(|e| parse_err(n, e.to_string()))?;
            let token = entry.token.into_owned();
            if table.contains(&token) {
                return Err(parse_err(n, format!("duplicate token `{token}`")));
            }
            table.insert(token, entry.vector.into_owned()).map_err(|e| parse_err(n, e.to_string()))?;
        }
        Ok(table)
    }
}
