//! PMU frequency CSV: `timestamp_ms,frequency_hz`.
//!
//! Timestamps are integer UTC epoch milliseconds. A missing sample is an
//! empty field or the literal `NaN`; both become masked samples. Rows must
//! follow the declared sample rate: each timestamp may differ from its ideal
//! grid position by the millisecond rounding (0.5 ms) plus 0.1 ms.

use std::io::{Read, Write};
use std::path::Path;

use num_rational::Ratio;
use thiserror::Error;

use super::{SampleRate, TimeSeries};

pub const HEADER: [&str; 2] = ["timestamp_ms", "frequency_hz"];

/// Allowed deviation from the ideal sample grid, in ms.
pub const SPACING_TOLERANCE_MS: f64 = 0.1;

#[derive(Debug, Error)]
pub enum PmuCsvError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header `timestamp_ms,frequency_hz`, found `{0}`")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: timestamp {found} ms is off the {rate} Hz grid (expected {expected:.3} ms)")]
    Spacing {
        line: u64,
        rate: SampleRate,
        expected: f64,
        found: i64,
    },
    #[error("no data rows")]
    Empty,
}

pub fn read_pmu_csv<R: Read>(reader: R, rate: SampleRate) -> Result<TimeSeries, PmuCsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || headers.iter().zip(HEADER).any(|(a, b)| a != b) {
        return Err(PmuCsvError::Header(headers.iter().collect::<Vec<_>>().join(",")));
    }
    let period = rate.period_ms();
    let mut start: Option<i64> = None;
    let mut values = Vec::new();
    let mut gaps = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = row.position().map_or(i as u64 + 2, |p| p.line());
        if row.len() != 2 {
            return Err(PmuCsvError::Row {
                line,
                message: format!("expected 2 fields, found {}", row.len()),
            });
        }
        let ts: i64 = row[0].parse().map_err(|_| PmuCsvError::Row {
            line,
            message: format!("invalid timestamp `{}`", &row[0]),
        })?;
        let t0 = *start.get_or_insert(ts);
        let expected = Ratio::from_integer(t0 as i128) + period * Ratio::from_integer(i as i128);
        let expected = *expected.numer() as f64 / *expected.denom() as f64;
        if (ts as f64 - expected).abs() > 0.5 + SPACING_TOLERANCE_MS {
            return Err(PmuCsvError::Spacing {
                line,
                rate,
                expected,
                found: ts,
            });
        }
        let field = &row[1];
        if field.is_empty() || field.eq_ignore_ascii_case("nan") {
            values.push(f64::NAN);
            gaps.push(true);
        } else {
            let v: f64 = field.parse().map_err(|_| PmuCsvError::Row {
                line,
                message: format!("invalid frequency `{field}`"),
            })?;
            if !v.is_finite() {
                return Err(PmuCsvError::Row {
                    line,
                    message: format!("non-finite frequency `{field}`"),
                });
            }
            values.push(v);
            gaps.push(false);
        }
    }
    let start = start.ok_or(PmuCsvError::Empty)?;
    Ok(TimeSeries::with_gaps(start, rate, values, gaps).expect("validated while reading"))
}

pub fn load_pmu_csv(path: &Path, rate: SampleRate) -> Result<TimeSeries, PmuCsvError> {
    let file = std::fs::File::open(path)?;
    read_pmu_csv(std::io::BufReader::new(file), rate)
}

/// Writes timestamps rounded to the millisecond; gaps as `NaN`.
pub fn write_pmu_csv<W: Write>(writer: W, series: &TimeSeries) -> Result<(), PmuCsvError> {
    let mut w = std::io::BufWriter::new(writer);
    writeln!(w, "{}", HEADER.join(","))?;
    for (i, (v, g)) in series.values().iter().zip(series.gap_mask()).enumerate() {
        if *g {
            writeln!(w, "{},NaN", series.timestamp_ms(i))?;
        } else {
            writeln!(w, "{},{}", series.timestamp_ms(i), v)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn save_pmu_csv(path: &Path, series: &TimeSeries) -> Result<(), PmuCsvError> {
    let file = std::fs::File::create(path)?;
    write_pmu_csv(file, series)
}
