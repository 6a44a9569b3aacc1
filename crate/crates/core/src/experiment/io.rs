//! File output with pinned formats: RFC-4180 CSV, LF line endings, '.'
//! decimal separator, 17 significant digits (round-trippable f64). The
//! byte-identical-output determinism guarantee rests on these writers,
//! so all float formatting funnels through [`fmt_f64`].

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Canonical float rendering: scientific, 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One value per line under a `value` header, to any writer.
pub fn write_sample_csv_to<W: Write>(mut w: W, values: &[f64]) -> Result<()> {
    w.write_all(b"value\n")?;
    for v in values {
        w.write_all(fmt_f64(*v).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// One value per line under a `value` header.
pub fn write_sample_csv(path: &Path, values: &[f64]) -> Result<()> {
    write_sample_csv_to(BufWriter::new(File::create(path)?), values)
}

/// Read a one-column sample file; a non-numeric first line is treated as
/// the header.
pub fn read_sample_csv(path: &Path) -> Result<Vec<f64>> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if idx == 0 => continue, // header
            Err(e) => {
                return Err(Error::Parse {
                    detail: format!("{}:{}: {e} ({t:?})", path.display(), idx + 1),
                })
            }
        }
    }
    Ok(out)
}

/// Mixed integer/float table rows.
pub enum Cell {
    Int(u64),
    Float(f64),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

/// CSV table with a header row, to any writer.
pub fn write_table_csv_to<W, I>(mut w: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<Cell>>,
{
    w.write_all(header.join(",").as_bytes())?;
    w.write_all(b"\n")?;
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            match cell {
                Cell::Int(v) => write!(w, "{v}")?,
                Cell::Float(v) => w.write_all(fmt_f64(v).as_bytes())?,
            }
        }
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// CSV table with a header row; caller supplies rows of [`Cell`]s.
pub fn write_table_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<Cell>>,
{
    write_table_csv_to(BufWriter::new(File::create(path)?), header, rows)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_csv_round_trip_is_exact() {
        let dir = std::env::temp_dir().join("exp-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("samples.csv");
        let values = vec![
            1.0,
            -0.1,
            std::f64::consts::PI,
            1.0e-300,
            -2.5e17,
            f64::MIN_POSITIVE,
        ];
        write_sample_csv(&path, &values).unwrap();
        let back = read_sample_csv(&path).unwrap();
        assert_eq!(values, back); // 17 significant digits round-trip f64
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("value\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn malformed_line_reports_position() {
        let dir = std::env::temp_dir().join("exp-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "value\n1.0\nnot-a-number\n").unwrap();
        let err = read_sample_csv(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err:?}");
        assert!(err.to_string().contains(":3:"));
    }
}
