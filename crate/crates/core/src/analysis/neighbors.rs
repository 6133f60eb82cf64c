use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embed::{EmbeddingTable, Provenance};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    /// `1 - cos`; a zero vector is at distance 1 from everything.
    Cosine,
}

impl Metric {
    /// Cosine for provider tables, Euclidean for everything else.
    pub fn default_for(provenance: &Provenance) -> Self {
        match provenance {
            Provenance::Remote(_) => Metric::Cosine,
            _ => Metric::Euclidean,
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            Metric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - dot / (na * nb)
                }
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            _ => Err(Error::invalid(format!("unknown metric `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeighborList {
    pub query: String,
    pub metric: Metric,
    /// Nearest first.
    pub neighbors: Vec<(String, f64)>,
}

/// Exact `k` nearest neighbours of `query`, excluding the query itself.
/// Equal distances are ordered by token.
pub fn knn(table: &EmbeddingTable, query: &str, k: usize, metric: Metric) -> Result<NeighborList> {
    let q = table.get(query).ok_or_else(|| Error::UnknownToken(query.to_owned()))?;
    if k >= table.len() {
        return Err(Error::invalid(format!("k = {k} must be below the table size {}", table.len())));
    }
    let mut all: Vec<(String, f64)> =
        table.iter().filter(|(t, _)| *t != query).map(|(t, v)| (t.to_owned(), metric.distance(q, v))).collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    Ok(NeighborList { query: query.to_owned(), metric, neighbors: all })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&str, &[f64])]) -> EmbeddingTable {
        let mut t = EmbeddingTable::new(rows[0].1.len(), Provenance::File);
        for (tok, v) in rows {
            t.insert(*tok, v.to_vec()).unwrap();
        }
        t
    }

    #[test]
    fn duplicate_vector_comes_first() {
        let t = table(&[("q", &[1.0, 2.0]), ("z", &[1.0, 2.0]), ("a", &[1.0, 2.5]), ("b", &[5.0, 0.0])]);
        let n = knn(&t, "q", 3, Metric::Euclidean).unwrap();
        assert_eq!(n.neighbors[0], ("z".to_string(), 0.0));
        assert_eq!(n.neighbors.iter().map(|p| p.0.as_str()).collect::<Vec<_>>(), ["z", "a", "b"]);
    }

    #[test]
    fn ties_break_by_token() {
        let t = table(&[("q", &[0.0]), ("b", &[1.0]), ("a", &[-1.0]), ("c", &[2.0])]);
        let n = knn(&t, "q", 2, Metric::Euclidean).unwrap();
        assert_eq!(n.neighbors, vec![("a".to_string(), 1.0), ("b".to_string(), 1.0)]);
    }

    #[test]
    fn errors() {
        let t = table(&[("q", &[0.0]), ("a", &[1.0])]);
        assert!(matches!(knn(&t, "x", 1, Metric::Cosine), Err(Error::UnknownToken(_))));
        assert!(knn(&t, "q", 2, Metric::Cosine).is_err());
    }

    #[test]
    fn cosine_ignores_scale() {
        let t = table(&[("q", &[1.0, 1.0]), ("far", &[10.0, 10.0]), ("near", &[1.0, 0.9])]);
        assert_eq!(knn(&t, "q", 1, Metric::Cosine).unwrap().neighbors[0].0, "far");
        assert_eq!(knn(&t, "q", 1, Metric::Euclidean).unwrap().neighbors[0].0, "near");
    }
}
