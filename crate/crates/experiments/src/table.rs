//! CSV emission.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! integers in decimal, lines end in `\n`. The runner appends `config_hash` and
//! `seed` to every row.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Rows of one suite, already formatted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Empty cell for a value that does not apply to a row.
pub fn missing() -> String {
    String::new()
}

/// CSV bytes of `table` with the `config_hash` and `seed` columns of `cfg`.
pub fn to_csv(table: &Table, cfg: &ExperimentConfig) -> Result<Vec<u8>> {
    let hash = cfg.hash();
    let seed = cfg.seed.to_string();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut header: Vec<&str> = table.columns.clone();
    header.extend(["config_hash", "seed"]);
    w.write_record(&header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(String::as_str).chain([hash.as_str(), seed.as_str()])).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}
