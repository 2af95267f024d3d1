use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime, NaiveTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::HailEvent;

const TIME_COLUMNS: [&str; 2] = ["ZTIME", "TIME"];
const LON_COLUMNS: [&str; 1] = ["LON"];
const LAT_COLUMNS: [&str; 1] = ["LAT"];
// SWDI rows carry both PROB (any hail) and SEVPROB (severe hail); the
// severe probability wins when both are present.
const PROB_COLUMNS: [&str; 2] = ["SEVPROB", "PROB"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{source_name}: header lacks a {column} column")]
    MissingColumn { source_name: String, column: &'static str },
    #[error("{source_name}: no rows parsed ({skipped} skipped)")]
    NoEvents { source_name: String, skipped: usize },
    #[error("{source_name}: {message}")]
    Csv { source_name: String, message: String },
    #[error("dataset has no events to write")]
    EmptyDataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    MalformedRow,
    MissingField,
    BadTime,
    BadCoordinate,
    BadProbability,
}

impl SkipReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::MalformedRow => "malformed-row",
            Self::MissingField => "missing-field",
            Self::BadTime => "bad-time",
            Self::BadCoordinate => "bad-coordinate",
            Self::BadProbability => "bad-probability",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRow {
    pub line_number: u64,
    pub reason: SkipReason,
}

/// One data row keyed by upper-cased column name.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub line_number: u64,
    pub fields: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub events: Vec<HailEvent>,
    pub source: String,
    pub skipped: Vec<SkippedRow>,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Date applied to bare `HH:MM:SS` time stamps.
    pub date: Option<NaiveDate>,
    /// Provenance label recorded in the dataset and in error messages.
    pub source: String,
}

struct Columns {
    time: String,
    lon: String,
    lat: String,
    prob: String,
}

fn find_column(headers: &[String], names: &[&str]) -> Option<String> {
    names
        .iter()
        .find(|name| headers.iter().any(|h| h == *name))
        .map(|name| name.to_string())
}

/// Parses header + rows into events. Column names are matched
/// case-insensitively; probabilities above 1 are read as percentages.
/// Rows that fail to parse are listed in `skipped`.
pub fn parse_csv<R: Read>(reader: R, options: &ParseOptions) -> Result<Dataset, IngestError> {
    let source = if options.source.is_empty() {
        "<input>".to_string()
    } else {
        options.source.clone()
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| IngestError::Csv {
            source_name: source.clone(),
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_ascii_uppercase())
        .collect();
    let missing = |column| IngestError::MissingColumn {
        source_name: source.clone(),
        column,
    };
    let columns = Columns {
        time: find_column(&headers, &TIME_COLUMNS).ok_or_else(|| missing("ZTIME/TIME"))?,
        lon: find_column(&headers, &LON_COLUMNS).ok_or_else(|| missing("LON"))?,
        lat: find_column(&headers, &LAT_COLUMNS).ok_or_else(|| missing("LAT"))?,
        prob: find_column(&headers, &PROB_COLUMNS).ok_or_else(|| missing("PROB/SEVPROB"))?,
    };

    let mut events = Vec::new();
    let mut skipped = Vec::new();
    for (row_index, row) in rdr.records().enumerate() {
        let line_fallback = row_index as u64 + 2;
        let record = match row {
            Ok(r) => r,
            Err(e) => {
                let line_number = e.position().map_or(line_fallback, |p| p.line());
                skipped.push(SkippedRow {
                    line_number,
                    reason: SkipReason::MalformedRow,
                });
                continue;
            }
        };
        let line_number = record.position().map_or(line_fallback, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let raw = RawRecord {
            line_number,
            fields: headers
                .iter()
                .cloned()
                .zip(record.iter().map(str::to_string))
                .collect(),
        };
        match parse_record(&raw, &columns, options.date) {
            Ok(event) => events.push(event),
            Err(reason) => skipped.push(SkippedRow { line_number, reason }),
        }
    }
    if events.is_empty() {
        return Err(IngestError::NoEvents {
            source_name: source,
            skipped: skipped.len(),
        });
    }
    Ok(Dataset {
        events,
        source,
        skipped,
    })
}

fn parse_record(raw: &RawRecord, columns: &Columns, date: Option<NaiveDate>) -> Result<HailEvent, SkipReason> {
    let field = |name: &String| {
        raw.fields
            .get(name)
            .map(String::as_str)
            .filter(|s| !s.is_empty())
            .ok_or(SkipReason::MissingField)
    };
    let time = parse_time(field(&columns.time)?, date).ok_or(SkipReason::BadTime)?;
    let lon = parse_finite(field(&columns.lon)?).ok_or(SkipReason::BadCoordinate)?;
    let lat = parse_finite(field(&columns.lat)?).ok_or(SkipReason::BadCoordinate)?;
    let mut prob = parse_finite(field(&columns.prob)?).ok_or(SkipReason::BadProbability)?;
    if prob > 1.0 {
        prob /= 100.0;
    }
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(SkipReason::BadProbability);
    }
    Ok(HailEvent::new(time, lon, lat, prob))
}

fn parse_finite(s: &str) -> Option<f64> {
    // Rust's float parser accepts "inf"/"NaN"; radar coordinates never are.
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_time(s: &str, date: Option<NaiveDate>) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    const NAIVE_FORMATS: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y%m%d%H%M%S",
        "%Y-%m-%dT%H:%M:%SZ",
    ];
    for fmt in NAIVE_FORMATS {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc());
        }
    }
    let time = NaiveTime::parse_from_str(s, "%H:%M:%S%.f").ok()?;
    Some(date?.and_time(time).and_utc())
}

/// Serializes a dataset as `ZTIME,LON,LAT,PROB` rows. Floats use the
/// shortest representation that parses back to the same value.
pub fn write_csv(dataset: &Dataset) -> Result<String, IngestError> {
    if dataset.events.is_empty() {
        return Err(IngestError::EmptyDataset);
    }
    let mut out = String::from("ZTIME,LON,LAT,PROB\n");
    for e in &dataset.events {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.time.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            e.lon,
            e.lat,
            e.prob
        ));
    }
    Ok(out)
}
