//! File formats: JSON laws and experiments, CSV samples, CSV vertex dumps.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::dist::AtomicDistribution;
use crate::error::{Error, Result};

/// Empirical law from CSV: one value per row, optionally followed by a
/// weight. No header; blank lines and `#` comments are skipped.
pub fn read_samples_csv<R: Read>(input: R) -> Result<AtomicDistribution> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut values = Vec::new();
    let mut weights = Vec::new();
    let mut weighted = None;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| Error::Argument(format!("row {}: cannot parse {:?}: {e}", row + 1, &rec[i])))
        };
        let has_weight = match rec.len() {
            1 => false,
            2 => true,
            k => {
                return Err(Error::Argument(format!(
                    "row {}: expected 1 or 2 columns, got {k}",
                    row + 1
                )))
            }
        };
        if *weighted.get_or_insert(has_weight) != has_weight {
            return Err(Error::Argument(format!(
                "row {}: weight column present on some rows only",
                row + 1
            )));
        }
        values.push(field(0)?);
        if has_weight {
            weights.push(field(1)?);
        }
    }
    let ws = (weighted == Some(true)).then_some(weights.as_slice());
    AtomicDistribution::from_samples(&values, ws)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Every `*.json` law in `dir`, sorted by file name.
pub fn read_family_dir(dir: &Path) -> Result<Vec<(PathBuf, AtomicDistribution)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "json"));
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Argument(format!("no .json laws in {}", dir.display())));
    }
    paths
        .into_iter()
        .map(|p| {
            let d = read_json(&p).map_err(|e| Error::Argument(format!("{}: {e}", p.display())))?;
            Ok((p, d))
        })
        .collect()
}

/// Writes `(x, y)` pairs as CSV under the given column names.
pub fn write_vertices_csv<W: Write>(
    out: W,
    columns: [&str; 2],
    points: impl IntoIterator<Item = (f64, f64)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for (x, y) in points {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
