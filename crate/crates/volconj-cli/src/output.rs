//! CSV / JSON emission.  `f64` fields use serde's shortest round-trip
//! formatting; arbitrary-precision values are fixed-digit MPFR strings.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use rug::Float;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Significant digits used for arbitrary-precision values in output.
pub const BIG_DIGITS: usize = 25;

/// Decimal string of `x` with [`BIG_DIGITS`] significant digits.
pub fn big(x: &Float) -> String {
    x.to_string_radix(10, Some(BIG_DIGITS))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `rows` as CSV (header + one line per row) or as a JSON array.
pub fn rows<T: Serialize>(rows: &[T], format: Format, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => {
            let mut csv = csv::Writer::from_writer(&mut w);
            for r in rows {
                csv.serialize(r)?;
            }
            csv.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes a single record: a one-row CSV table or a JSON object.
pub fn record<T: Serialize>(rec: &T, format: Format, out: Option<&Path>) -> Result<()> {
    match format {
        Format::Csv => rows(std::slice::from_ref(rec), format, out),
        Format::Json => {
            let mut w = sink(out)?;
            serde_json::to_writer_pretty(&mut w, rec)?;
            writeln!(w)?;
            w.flush()?;
            Ok(())
        }
    }
}
