//! CSV ingestion for charging-pile sessions and electricity prices.
//!
//! Sessions files carry a start timestamp, either a duration in minutes or an
//! end timestamp, an energy column in kWh and an optional region label.
//! Timestamps are treated as naive local clock time of the dataset.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerated fraction of malformed session rows.
pub const DEFAULT_MAX_REJECT_FRACTION: f64 = 0.10;

/// Number of hourly slots in a daily price or demand profile.
pub const HOURS_PER_DAY: usize = 24;

const TIMESTAMP_OUT: &str = "%Y-%m-%dT%H:%M:%S%.f";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: malformed csv: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },
    #[error("{context}: missing column `{column}`")]
    MissingColumn { context: String, column: String },
    #[error(
        "{context}: {rejected} of {total} rows rejected (limit {:.1}%); first: line {first_line}: {first_reason}",
        limit * 100.0
    )]
    TooManyRejected {
        context: String,
        rejected: usize,
        total: usize,
        limit: f64,
        first_line: u64,
        first_reason: String,
    },
    #[error("no sessions to aggregate")]
    Empty,
    #[error("{context}: line {line}: {reason}")]
    InvalidPrice {
        context: String,
        line: u64,
        reason: String,
    },
    #[error("{context}: daily price profile needs {need} hourly rows, got {got}")]
    TooFewPrices {
        context: String,
        got: usize,
        need: usize,
    },
}

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

/// One charging-pile session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingSession {
    pub start_time: NaiveDateTime,
    pub duration_minutes: f64,
    pub energy_kwh: f64,
    pub region_id: String,
}

/// Column names used when reading a sessions file.
///
/// When both `duration` and `end` name columns present in the header, the
/// duration column wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionSchema {
    pub start: String,
    pub duration: String,
    pub end: String,
    pub energy: String,
    pub region: String,
}

impl Default for SessionSchema {
    fn default() -> Self {
        Self {
            start: "start".into(),
            duration: "duration_min".into(),
            end: "end".into(),
            energy: "energy_kwh".into(),
            region: "region".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParseOptions {
    pub schema: SessionSchema,
    /// Reject the whole file when more than this fraction of rows is malformed.
    pub max_reject_fraction: f64,
    /// Keep only sessions whose region label equals this value.
    pub region: Option<String>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            schema: SessionSchema::default(),
            max_reject_fraction: DEFAULT_MAX_REJECT_FRACTION,
            region: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowRejection {
    /// 1-based line number in the file (header is line 1).
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSessions {
    pub sessions: Vec<ChargingSession>,
    pub rejected: Vec<RowRejection>,
}

/// Hourly arrival counts starting at `origin` (truncated to the hour).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrivalSeries {
    pub origin: NaiveDateTime,
    pub hourly_counts: Vec<u32>,
}

impl ArrivalSeries {
    pub fn total(&self) -> u64 {
        self.hourly_counts.iter().map(|&c| u64::from(c)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceKind {
    /// 24 prices indexed by hour of day.
    Daily,
    /// One price per hour of the analysed horizon, starting at its origin.
    Horizon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub hourly_price: Vec<f64>,
    pub kind: PriceKind,
}

impl PriceSeries {
    pub fn flat(price: f64) -> Self {
        Self {
            hourly_price: vec![price; HOURS_PER_DAY],
            kind: PriceKind::Daily,
        }
    }

    /// Price for the `offset`-th hour after a series origin whose clock hour
    /// is `origin_hour`. Daily profiles wrap by hour of day, horizon series
    /// are indexed directly and wrap at their end.
    pub fn price_for(&self, origin_hour: u32, offset: usize) -> f64 {
        let n = self.hourly_price.len();
        match self.kind {
            PriceKind::Daily => self.hourly_price[(origin_hour as usize + offset) % n],
            PriceKind::Horizon => self.hourly_price[offset % n],
        }
    }
}

pub fn parse_sessions(path: &Path, opts: &ParseOptions) -> Result<ParsedSessions> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_sessions(file, &path.display().to_string(), opts)
}

/// Reads sessions from any CSV source. `context` names the source in errors.
pub fn read_sessions<R: Read>(
    reader: R,
    context: &str,
    opts: &ParseOptions,
) -> Result<ParsedSessions> {
    let csv_err = |source| IngestError::Csv {
        context: context.to_string(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let missing = |column: &str| IngestError::MissingColumn {
        context: context.to_string(),
        column: column.to_string(),
    };

    let schema = &opts.schema;
    let start_col = find(&schema.start).ok_or_else(|| missing(&schema.start))?;
    let energy_col = find(&schema.energy).ok_or_else(|| missing(&schema.energy))?;
    let span = match (find(&schema.duration), find(&schema.end)) {
        (Some(c), _) => Span::Duration(c),
        (None, Some(c)) => Span::End(c),
        (None, None) => return Err(missing(&format!("{}|{}", schema.duration, schema.end))),
    };
    let region_col = find(&schema.region);

    let mut sessions = Vec::new();
    let mut rejected = Vec::new();
    let mut total = 0usize;
    for (i, record) in rdr.records().enumerate() {
        // header is line 1
        let line = record
            .as_ref()
            .ok()
            .and_then(|r| r.position())
            .map_or(i as u64 + 2, |p| p.line());
        total += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                rejected.push(RowRejection {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let region = region_col
            .and_then(|c| record.get(c))
            .unwrap_or("")
            .to_string();
        match parse_row(&record, start_col, span, energy_col, region) {
            Ok(s) => {
                if opts.region.as_ref().is_none_or(|r| *r == s.region_id) {
                    sessions.push(s);
                }
            }
            Err(reason) => rejected.push(RowRejection { line, reason }),
        }
    }

    if total > 0 && rejected.len() as f64 > opts.max_reject_fraction * total as f64 {
        let first = &rejected[0];
        return Err(IngestError::TooManyRejected {
            context: context.to_string(),
            rejected: rejected.len(),
            total,
            limit: opts.max_reject_fraction,
            first_line: first.line,
            first_reason: first.reason.clone(),
        });
    }
    Ok(ParsedSessions { sessions, rejected })
}

#[derive(Clone, Copy)]
enum Span {
    Duration(usize),
    End(usize),
}

fn parse_row(
    record: &csv::StringRecord,
    start_col: usize,
    span: Span,
    energy_col: usize,
    region_id: String,
) -> std::result::Result<ChargingSession, String> {
    let field = |c: usize| record.get(c).unwrap_or("");
    let start_time = parse_timestamp(field(start_col))?;
    let duration_minutes = match span {
        Span::Duration(c) => parse_non_negative(field(c), "duration")?,
        Span::End(c) => {
            let end = parse_timestamp(field(c))?;
            let minutes = (end - start_time).num_milliseconds() as f64 / 60_000.0;
            if minutes < 0.0 {
                return Err(format!("end {end} precedes start {start_time}"));
            }
            minutes
        }
    };
    let energy_kwh = parse_non_negative(field(energy_col), "energy")?;
    Ok(ChargingSession {
        start_time,
        duration_minutes,
        energy_kwh,
        region_id,
    })
}

fn parse_non_negative(raw: &str, what: &str) -> std::result::Result<f64, String> {
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("non-numeric {what} `{raw}`"))?;
    if !v.is_finite() || v < 0.0 {
        return Err(format!(
            "{what} must be finite and non-negative, got `{raw}`"
        ));
    }
    Ok(v)
}

/// Accepts ISO-8601-like local timestamps (`T` or space separated, seconds
/// optional) and bare `HH:MM[:SS]` clock times, which are anchored on
/// 1970-01-01.
pub fn parse_timestamp(raw: &str) -> std::result::Result<NaiveDateTime, String> {
    const DATE_TIME: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%d %H:%M",
    ];
    for fmt in DATE_TIME {
        if let Ok(t) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Ok(t);
        }
    }
    for fmt in ["%H:%M:%S%.f", "%H:%M"] {
        if let Ok(t) = NaiveTime::parse_from_str(raw, fmt) {
            return Ok(NaiveDate::default().and_time(t));
        }
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(raw) {
        // keep the wall clock as written
        return Ok(t.naive_local());
    }
    Err(format!("unparseable timestamp `{raw}`"))
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    t.format(TIMESTAMP_OUT).to_string()
}

/// Writes sessions in the default schema with a duration column.
pub fn write_sessions<W: Write>(writer: W, sessions: &[ChargingSession]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["start", "duration_min", "energy_kwh", "region"])?;
    for s in sessions {
        w.write_record([
            format_timestamp(&s.start_time),
            s.duration_minutes.to_string(),
            s.energy_kwh.to_string(),
            s.region_id.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn truncate_to_hour(t: NaiveDateTime) -> NaiveDateTime {
    t.date()
        .and_hms_opt(t.hour(), 0, 0)
        .expect("hour of a valid timestamp is valid")
}

/// Hour offset of `t` from an hour-aligned `origin`.
pub(crate) fn hour_offset(origin: NaiveDateTime, t: NaiveDateTime) -> usize {
    (truncate_to_hour(t) - origin).num_hours() as usize
}

pub fn hourly_arrivals(sessions: &[ChargingSession]) -> Result<ArrivalSeries> {
    let (origin, len) = hour_span(sessions).ok_or(IngestError::Empty)?;
    let mut hourly_counts = vec![0u32; len];
    for s in sessions {
        hourly_counts[hour_offset(origin, s.start_time)] += 1;
    }
    Ok(ArrivalSeries {
        origin,
        hourly_counts,
    })
}

/// Hour-aligned origin and number of clock hours spanned by the sessions.
pub(crate) fn hour_span(sessions: &[ChargingSession]) -> Option<(NaiveDateTime, usize)> {
    let min = sessions.iter().map(|s| s.start_time).min()?;
    let max = sessions.iter().map(|s| s.start_time).max()?;
    let origin = truncate_to_hour(min);
    let len = hour_offset(origin, max) + 1;
    Some((origin, len))
}

pub fn load_prices(path: &Path, kind: PriceKind) -> Result<PriceSeries> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_prices(file, &path.display().to_string(), kind)
}

/// Reads an `hour,price` table. Rows are ordered by hour and must cover a
/// gap-free run of hours. In daily mode the first 24 hours are kept and
/// index 0 is taken as midnight.
pub fn read_prices<R: Read>(reader: R, context: &str, kind: PriceKind) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|source| IngestError::Csv {
            context: context.to_string(),
            source,
        })?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn {
                context: context.to_string(),
                column: name.to_string(),
            })
    };
    let hour_col = col("hour")?;
    let price_col = col("price")?;

    let mut rows: Vec<(i64, f64, u64)> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let invalid = |line: u64, reason: String| IngestError::InvalidPrice {
            context: context.to_string(),
            line,
            reason,
        };
        let record = record.map_err(|e| invalid(i as u64 + 2, e.to_string()))?;
        let line = record.position().map_or(i as u64 + 2, |p| p.line());
        let hour_raw = record.get(hour_col).unwrap_or("");
        let price_raw = record.get(price_col).unwrap_or("");
        let hour: i64 = hour_raw
            .parse()
            .map_err(|_| invalid(line, format!("non-integer hour `{hour_raw}`")))?;
        let price: f64 = price_raw
            .parse()
            .map_err(|_| invalid(line, format!("non-numeric price `{price_raw}`")))?;
        if !price.is_finite() || price < 0.0 {
            return Err(invalid(
                line,
                format!("price must be non-negative, got {price_raw}"),
            ));
        }
        rows.push((hour, price, line));
    }
    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        if w[1].0 != w[0].0 + 1 {
            return Err(IngestError::InvalidPrice {
                context: context.to_string(),
                line: w[1].2,
                reason: format!("hour {} does not follow hour {}", w[1].0, w[0].0),
            });
        }
    }

    let mut hourly_price: Vec<f64> = rows.iter().map(|r| r.1).collect();
    match kind {
        PriceKind::Daily => {
            if hourly_price.len() < HOURS_PER_DAY {
                return Err(IngestError::TooFewPrices {
                    context: context.to_string(),
                    got: hourly_price.len(),
                    need: HOURS_PER_DAY,
                });
            }
            hourly_price.truncate(HOURS_PER_DAY);
        }
        PriceKind::Horizon => {
            if hourly_price.is_empty() {
                return Err(IngestError::TooFewPrices {
                    context: context.to_string(),
                    got: 0,
                    need: 1,
                });
            }
        }
    }
    Ok(PriceSeries { hourly_price, kind })
}
