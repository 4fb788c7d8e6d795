//! Record types and their CSV/JSON serialization.
//!
//! Field order is the CSV column order. Values are strings: exact fractions
//! (`3/32`, `6`) in rational mode and `{:.16e}` (17 significant digits) in
//! float mode, so both round-trip without loss.

use std::io::Write;

use runsdist::Scalar;
use serde::Serialize;

use crate::args::Format;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct PmfRecord {
    pub k: u32,
    pub r: u32,
    pub p: String,
    pub scheme: &'static str,
    pub variant: String,
    pub engine: &'static str,
    pub n: i64,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct MomentRecord {
    pub k: u32,
    pub r: u32,
    pub p: String,
    pub scheme: &'static str,
    pub variant: String,
    pub route: &'static str,
    pub kind: &'static str,
    /// `moment`, `skewness` or `excess-kurtosis`.
    pub statistic: &'static str,
    pub order: Option<usize>,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct CompareRecord {
    pub k: u32,
    pub r: u32,
    pub p: String,
    pub scheme: &'static str,
    pub variant: String,
    pub n: i64,
    pub engine: String,
    pub value: String,
    /// Value minus the first engine's value at the same n.
    pub delta: String,
    pub max_pairwise_diff: String,
}

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub status: &'static str,
    pub max_abs_diff: String,
    pub at_n: Option<i64>,
    pub tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulateRecord {
    pub k: u32,
    pub r: u32,
    pub p: String,
    pub variant: String,
    pub samples: u64,
    pub seed: u64,
    pub mean: String,
    pub variance: String,
    pub skewness: String,
    pub standard_error: String,
    pub analytic_mean: String,
}

#[derive(Debug, Serialize)]
pub struct HistogramRecord {
    pub n: u64,
    pub count: u64,
}

pub fn value<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        v.to_rational().to_string()
    } else {
        float(v.to_f64())
    }
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_csv<T: Serialize, W: Write>(out: W, records: &[T]) -> Result<(), CliError> {
    let mut writer = csv_writer(out);
    for record in records {
        writer.serialize(record).map_err(CliError::io)?;
    }
    writer.flush().map_err(CliError::io)
}

pub fn emit<T: Serialize>(records: &[T], format: Format) -> Result<(), CliError> {
    let stdout = std::io::stdout().lock();
    match format {
        Format::Csv => write_csv(stdout, records),
        Format::Json => write_json(stdout, &records),
    }
}

pub fn write_json<T: Serialize + ?Sized, W: Write>(mut out: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(CliError::io)?;
    writeln!(out).map_err(CliError::io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn value_formats() {
        assert_eq!(value(&Rational::from((3, 32))), "3/32");
        assert_eq!(value(&Rational::from(6)), "6");
        assert_eq!(value(&0.1f64), "1.0000000000000001e-1");
        let round: f64 = value(&(1.0f64 / 3.0)).parse().unwrap();
        assert_eq!(round, 1.0 / 3.0);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[HistogramRecord { n: 3, count: 7 }]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,count\n3,7\n");
    }
}
