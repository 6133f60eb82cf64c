use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::abstraction::Method;
use crate::error::Result;

/// One solved abstraction, measured in the original game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub game: String,
    pub method: Method,
    pub k1: usize,
    /// Flop bucket count; empty for games with one observation round.
    pub k2: Option<usize>,
    pub seed: u64,
    pub num_sequences: usize,
    pub nnz: usize,
    /// Lifted strategy's exploitability in the original game.
    pub exploitability: f64,
}

impl ExperimentRecord {
    pub(crate) fn cell_key(&self) -> (String, &'static str, usize, Option<usize>) {
        (self.game.clone(), self.method.as_str(), self.k1, self.k2)
    }
}

/// Mean and standard error of one `(game, method, k1, k2)` cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub game: String,
    pub method: Method,
    pub k1: usize,
    pub k2: Option<usize>,
    pub n: usize,
    pub num_sequences_mean: f64,
    pub nnz_mean: f64,
    pub exploitability_mean: f64,
    /// Sample standard deviation over `sqrt(n)`; empty when `n == 1`.
    pub exploitability_sem: Option<f64>,
}

pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<_, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        cells.entry(r.cell_key()).or_default().push(r);
    }
    cells
        .into_values()
        .map(|rs| {
            let n = rs.len();
            let mean = |f: &dyn Fn(&ExperimentRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n as f64;
            let eps_mean = mean(&|r| r.exploitability);
            let sem = (n > 1).then(|| {
                let var = rs.iter().map(|r| (r.exploitability - eps_mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            });
            SummaryRow {
                game: rs[0].game.clone(),
                method: rs[0].method,
                k1: rs[0].k1,
                k2: rs[0].k2,
                n,
                num_sequences_mean: mean(&|r| r.num_sequences as f64),
                nnz_mean: mean(&|r| r.nnz as f64),
                exploitability_mean: eps_mean,
                exploitability_sem: sem,
            }
        })
        .collect()
}

/// `results.csv` becomes `results_summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "results".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}_summary.csv"))
}

fn write_rows<T: Serialize, W: Write>(out: W, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

const RECORD_HEADER: [&str; 8] = ["game", "method", "k1", "k2", "seed", "num_sequences", "nnz", "exploitability"];
const SUMMARY_HEADER: [&str; 9] =
    ["game", "method", "k1", "k2", "n", "num_sequences_mean", "nnz_mean", "exploitability_mean", "exploitability_sem"];

/// Writes the per-record CSV at `path` and the per-cell summary next to it.
/// Returns the summary path.
pub fn emit_results(records: &[ExperimentRecord], path: &Path) -> Result<PathBuf> {
    write_records(records, File::create(path)?)?;
    let summary = summary_path(path);
    write_rows(File::create(&summary)?, &summarize(records), &SUMMARY_HEADER)?;
    Ok(summary)
}

/// The per-record CSV alone, to any writer.
pub fn write_records<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    write_rows(out, records, &RECORD_HEADER)
}

pub fn read_results(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
