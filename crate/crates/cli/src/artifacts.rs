//! CSV and JSON writers. Floats use Rust's shortest round-trip formatting,
//! so identical runs produce identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub const SERIES_HEADER: [&str; 8] = ["t", "mass", "energy", "h", "Linf", "L4", "module_k_norm", "boundary_mass"];

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Writes `rows` under `header` as RFC-4180 CSV.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(BufWriter::new(file));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Reads two named columns of a CSV file as `(x, y)` pairs.
pub fn read_columns(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("column {name:?} not found in {}", path.display()))
    };
    let (ix, iy) = (find(x)?, find(y)?);
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            let s = record.get(i).unwrap_or("");
            s.trim().parse::<f64>().with_context(|| format!("not a number: {s:?}"))
        };
        out.push((parse(ix)?, parse(iy)?));
    }
    Ok(out)
}
