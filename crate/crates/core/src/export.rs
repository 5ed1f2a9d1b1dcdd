//! CSV writers for trajectories, schedules and tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

/// `prefix_1, …, prefix_count`.
pub fn numbered(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}_{i}")).collect()
}

/// Writes a header line followed by one record per row.
pub fn write_table<W, I>(w: W, header: &[String], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(std::io::Error::from)?;
    for row in rows {
        out.write_record(row.iter().map(|x| format!("{x:e}"))).map_err(std::io::Error::from)?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_table<I>(path: impl AsRef<Path>, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let file = BufWriter::new(File::create(path)?);
    write_table(file, header, rows)
}
