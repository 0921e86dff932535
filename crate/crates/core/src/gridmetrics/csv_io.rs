//! Balance, inertia and curtailment tables.
//!
//! Line numbers in errors count the header as line 1.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use thiserror::Error;

use super::{CurtailReason, CurtailmentRecord, Region, RegionalHourRecord};

pub const BALANCE_HEADER: &str = "date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,der_mw,demand_mw";
/// Balance layout where the solar column already includes DER.
pub const BALANCE_HEADER_COMBINED: &str = "date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,demand_mw";
pub const INERTIA_HEADER: &str = "date,hour,region,inertia_mws";
pub const CURTAILMENT_HEADER: &str = "date,hour,region,curtailed_wind_mw,reason";

#[derive(Debug, Error)]
pub enum GridCsvError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("bad header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

impl GridCsvError {
    pub fn line(&self) -> Option<u64> {
        match self {
            GridCsvError::Row { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Balance records with the source line of each.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceTable {
    pub records: Vec<RegionalHourRecord>,
    pub lines: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct InertiaRow {
    pub date: NaiveDate,
    pub hour: u8,
    pub region: Region,
    pub inertia_mws: f64,
}

#[derive(Deserialize)]
struct BalanceRow {
    date: NaiveDate,
    hour: u8,
    region: Region,
    hydro_mw: f64,
    thermal_mw: f64,
    wind_mw: f64,
    solar_mw: f64,
    #[serde(default)]
    der_mw: f64,
    demand_mw: f64,
}

#[derive(Deserialize)]
struct CurtailmentRow {
    date: NaiveDate,
    hour: u8,
    region: Region,
    curtailed_wind_mw: f64,
    reason: CurtailReason,
}

fn read_rows<T: DeserializeOwned, R: Read>(
    reader: R,
    headers: &[&str],
) -> Result<Vec<(u64, T)>, GridCsvError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let found = rdr
        .headers()
        .map_err(|e| row_error(&e, 1))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if !headers.contains(&found.as_str()) {
        return Err(GridCsvError::Header {
            expected: headers[0].to_string(),
            found,
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<T>().enumerate() {
        let fallback = i as u64 + 2;
        match row {
            Ok(v) => out.push((fallback, v)),
            Err(e) => return Err(row_error(&e, fallback)),
        }
    }
    Ok(out)
}

fn row_error(e: &csv::Error, fallback: u64) -> GridCsvError {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback);
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(f) => format!("column {}: {}", f + 1, err.kind()),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    };
    GridCsvError::Row { line, message }
}

fn check_hour(line: u64, hour: u8) -> Result<(), GridCsvError> {
    if hour > 23 {
        return Err(GridCsvError::Row {
            line,
            message: format!("hour {hour} outside 0..=23"),
        });
    }
    Ok(())
}

/// Parse a balance table. With `combined_solar`, the layout without a
/// `der_mw` column is also accepted and DER is set to zero.
pub fn read_balance_csv<R: Read>(reader: R, combined_solar: bool) -> Result<BalanceTable, GridCsvError> {
    let headers: &[&str] = if combined_solar {
        &[BALANCE_HEADER, BALANCE_HEADER_COMBINED]
    } else {
        &[BALANCE_HEADER]
    };
    let rows = read_rows::<BalanceRow, _>(reader, headers)?;
    let mut table = BalanceTable {
        records: Vec::with_capacity(rows.len()),
        lines: Vec::with_capacity(rows.len()),
    };
    for (line, r) in rows {
        let rec = RegionalHourRecord::new(
            r.region,
            r.date,
            r.hour,
            r.hydro_mw,
            r.thermal_mw,
            r.wind_mw,
            r.solar_mw,
            r.der_mw,
            r.demand_mw,
        )
        .map_err(|e| GridCsvError::Row {
            line,
            message: e.to_string(),
        })?;
        table.records.push(rec);
        table.lines.push(line);
    }
    Ok(table)
}

pub fn read_inertia_csv<R: Read>(reader: R) -> Result<Vec<InertiaRow>, GridCsvError> {
    read_rows::<InertiaRow, _>(reader, &[INERTIA_HEADER])?
        .into_iter()
        .map(|(line, r)| {
            check_hour(line, r.hour)?;
            if !(r.inertia_mws.is_finite() && r.inertia_mws > 0.0) {
                return Err(GridCsvError::Row {
                    line,
                    message: format!("inertia must be positive, got {}", r.inertia_mws),
                });
            }
            Ok(r)
        })
        .collect()
}

pub fn read_curtailment_csv<R: Read>(reader: R) -> Result<Vec<CurtailmentRecord>, GridCsvError> {
    read_rows::<CurtailmentRow, _>(reader, &[CURTAILMENT_HEADER])?
        .into_iter()
        .map(|(line, r)| {
            check_hour(line, r.hour)?;
            if !(r.curtailed_wind_mw.is_finite() && r.curtailed_wind_mw >= 0.0) {
                return Err(GridCsvError::Row {
                    line,
                    message: format!("curtailed_wind_mw must be non-negative, got {}", r.curtailed_wind_mw),
                });
            }
            Ok(CurtailmentRecord {
                region: r.region,
                date: r.date,
                hour: r.hour,
                curtailed_wind_mw: r.curtailed_wind_mw,
                reason: r.reason,
            })
        })
        .collect()
}

fn open(path: &Path) -> Result<File, GridCsvError> {
    File::open(path).map_err(|source| GridCsvError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_balance_csv(path: &Path, combined_solar: bool) -> Result<BalanceTable, GridCsvError> {
    read_balance_csv(io::BufReader::new(open(path)?), combined_solar)
}

pub fn load_inertia_csv(path: &Path) -> Result<Vec<InertiaRow>, GridCsvError> {
    read_inertia_csv(io::BufReader::new(open(path)?))
}

pub fn load_curtailment_csv(path: &Path) -> Result<Vec<CurtailmentRecord>, GridCsvError> {
    read_curtailment_csv(io::BufReader::new(open(path)?))
}

pub fn write_balance_csv<W: Write>(mut w: W, records: &[RegionalHourRecord]) -> io::Result<()> {
    writeln!(w, "{BALANCE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.date, r.hour, r.region, r.hydro_mw, r.thermal_mw, r.wind_mw, r.solar_mw, r.der_mw, r.demand_mw
        )?;
    }
    Ok(())
}

/// Rows without inertia are skipped.
pub fn write_inertia_csv<W: Write>(mut w: W, records: &[RegionalHourRecord]) -> io::Result<()> {
    writeln!(w, "{INERTIA_HEADER}")?;
    for r in records {
        if let Some(h) = r.inertia_mws {
            writeln!(w, "{},{},{},{}", r.date, r.hour, r.region, h)?;
        }
    }
    Ok(())
}

pub fn write_curtailment_csv<W: Write>(mut w: W, events: &[CurtailmentRecord]) -> io::Result<()> {
    writeln!(w, "{CURTAILMENT_HEADER}")?;
    for e in events {
        writeln!(
            w,
            "{},{},{},{},{}",
            e.date,
            e.hour,
            e.region,
            e.curtailed_wind_mw,
            e.reason.code()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BALANCE: &str = "\
date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,der_mw,demand_mw
2023-07-17,0,NE,500,300,10009,1821,0,12117
2023-07-17,1,SE_CW,20000,3000,0,0,0,30000
";

    #[test]
    fn balance_roundtrip() {
        let t = read_balance_csv(BALANCE.as_bytes(), false).unwrap();
        assert_eq!(t.records.len(), 2);
        assert_eq!(t.lines, vec![2, 3]);
        assert_eq!(t.records[1].region, Region::SeCw);
        let mut buf = Vec::new();
        write_balance_csv(&mut buf, &t.records).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), BALANCE);
    }

    #[test]
    fn combined_layout_needs_flag() {
        let csv = "date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,demand_mw\n2023-01-01,0,N,1,1,1,2,10\n";
        assert!(matches!(read_balance_csv(csv.as_bytes(), false), Err(GridCsvError::Header { .. })));
        let t = read_balance_csv(csv.as_bytes(), true).unwrap();
        assert_eq!(t.records[0].solar_mw, 2.0);
        assert_eq!(t.records[0].der_mw, 0.0);
    }

    #[test]
    fn row_errors_cite_line() {
        let bad_region = BALANCE.replace("SE_CW", "XX");
        let e = read_balance_csv(bad_region.as_bytes(), false).unwrap_err();
        assert_eq!(e.line(), Some(3));
        let negative = BALANCE.replace(",10009,", ",-1,");
        assert_eq!(read_balance_csv(negative.as_bytes(), false).unwrap_err().line(), Some(2));
        let bad_hour = "date,hour,region,inertia_mws\n2023-01-01,24,N,5\n";
        assert_eq!(read_inertia_csv(bad_hour.as_bytes()).unwrap_err().line(), Some(2));
        let bad_date = "date,hour,region,curtailed_wind_mw,reason\n2023-13-01,1,N,5,reliability\n";
        assert_eq!(read_curtailment_csv(bad_date.as_bytes()).unwrap_err().line(), Some(2));
    }

    #[test]
    fn curtailment_roundtrip() {
        let csv = "date,hour,region,curtailed_wind_mw,reason\n2023-08-01,9,NE,120.5,external_electrical\n";
        let events = read_curtailment_csv(csv.as_bytes()).unwrap();
        assert_eq!(events[0].reason, CurtailReason::ExternalUnavailability);
        let mut buf = Vec::new();
        write_curtailment_csv(&mut buf, &events).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), csv);
    }

    #[test]
    fn unknown_reason_rejected() {
        let csv = "date,hour,region,curtailed_wind_mw,reason\n2023-08-01,9,NE,1,storm\n";
        assert!(matches!(read_curtailment_csv(csv.as_bytes()), Err(GridCsvError::Row { line: 2, .. })));
    }
}
