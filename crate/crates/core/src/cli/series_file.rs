//! Weather and measurement CSV files.
//!
//! Weather: `timestamp,T_ae,T_sky,I_N,I_S,I_E,I_W,I_H` (°C, W/m²).
//! Measurements: `timestamp,node_<k>,...` (°C), one column per measured
//! node, the air node included. Timestamps are ISO-8601 local times on a
//! uniform grid.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDateTime;

use crate::error::{Error, Result};
use crate::model::NodeId;
use crate::simulate::{MeasurementSeries, WeatherRecord, WeatherSeries};

pub const WEATHER_HEADER: [&str; 8] = ["timestamp", "T_ae", "T_sky", "I_N", "I_S", "I_E", "I_W", "I_H"];

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// A parsed CSV table: timestamps plus numeric columns.
struct Table {
    headers: Vec<String>,
    times: Vec<NaiveDateTime>,
    /// Row-major, without the timestamp column.
    rows: Vec<Vec<f64>>,
}

fn parse_err(path: &str, line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        line,
        field: field.into(),
        message: message.into(),
    }
}

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim().trim_end_matches('Z');
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M"))
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
        .ok()
}

pub fn format_timestamp(t: NaiveDateTime) -> String {
    t.format(TIMESTAMP_FORMAT).to_string()
}

fn read_table(text: &str, path: &str) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(path, 1, "header", e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.first().map(String::as_str) != Some("timestamp") {
        return Err(parse_err(path, 1, "header", "first column must be `timestamp`"));
    }
    let mut times = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, "row", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let t = parse_timestamp(&record[0])
            .ok_or_else(|| parse_err(path, line, "timestamp", format!("`{}` is not ISO-8601", &record[0])))?;
        let mut row = Vec::with_capacity(headers.len() - 1);
        for (value, name) in record.iter().zip(&headers).skip(1) {
            let x: f64 = value
                .parse()
                .map_err(|_| parse_err(path, line, name, format!("`{value}` is not a number")))?;
            if !x.is_finite() {
                return Err(parse_err(path, line, name, "value must be finite"));
            }
            row.push(x);
        }
        times.push(t);
        rows.push(row);
    }
    Ok(Table { headers, times, rows })
}

/// Checks strictly increasing, uniformly spaced timestamps and returns the
/// step in seconds.
fn uniform_step(times: &[NaiveDateTime], path: &str) -> Result<f64> {
    if times.len() < 2 {
        return Err(parse_err(path, 2, "timestamp", "at least two rows are required"));
    }
    let dt = times[1] - times[0];
    for (i, w) in times.windows(2).enumerate() {
        let step = w[1] - w[0];
        // data rows start on line 2
        let line = i + 3;
        if step <= chrono::Duration::zero() {
            return Err(parse_err(path, line, "timestamp", "timestamps must increase"));
        }
        if step != dt {
            return Err(parse_err(
                path,
                line,
                "timestamp",
                format!(
                    "non-uniform step: {} s after {} s",
                    step.num_milliseconds() as f64 / 1000.0,
                    dt.num_milliseconds() as f64 / 1000.0
                ),
            ));
        }
    }
    Ok(dt.num_milliseconds() as f64 / 1000.0)
}

pub fn parse_weather(text: &str, path: &str) -> Result<WeatherSeries> {
    let table = read_table(text, path)?;
    if table.headers != WEATHER_HEADER {
        return Err(parse_err(
            path,
            1,
            "header",
            format!("expected `{}`", WEATHER_HEADER.join(",")),
        ));
    }
    let dt = uniform_step(&table.times, path)?;
    for (i, row) in table.rows.iter().enumerate() {
        if let Some(k) = row[2..].iter().position(|s| *s < 0.0) {
            return Err(parse_err(path, i + 2, WEATHER_HEADER[k + 3], "solar flux must be >= 0"));
        }
    }
    let records = table
        .rows
        .iter()
        .map(|r| WeatherRecord {
            t_ae: r[0],
            t_sky: r[1],
            solar: [r[2], r[3], r[4], r[5], r[6]],
        })
        .collect();
    Ok(WeatherSeries::new(dt, records)?.with_start(table.times[0]))
}

/// Measurements together with the timestamp of their first row.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedMeasurements {
    pub start: NaiveDateTime,
    pub series: MeasurementSeries,
}

pub fn parse_measurements(text: &str, path: &str) -> Result<TimedMeasurements> {
    let table = read_table(text, path)?;
    let mut nodes = Vec::new();
    for name in &table.headers[1..] {
        let id = name
            .strip_prefix("node_")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|k| *k >= 1)
            .ok_or_else(|| parse_err(path, 1, name, "expected `node_<k>` with k >= 1"))?;
        if nodes.contains(&NodeId(id)) {
            return Err(parse_err(path, 1, name, "duplicate column"));
        }
        nodes.push(NodeId(id));
    }
    if nodes.is_empty() {
        return Err(parse_err(path, 1, "header", "no node columns"));
    }
    let dt = uniform_step(&table.times, path)?;
    let mut series: BTreeMap<NodeId, Vec<f64>> = BTreeMap::new();
    for (j, node) in nodes.iter().enumerate() {
        series.insert(*node, table.rows.iter().map(|r| r[j]).collect());
    }
    Ok(TimedMeasurements {
        start: table.times[0],
        series: MeasurementSeries::new(dt, series)?,
    })
}

pub fn read_weather(path: &Path) -> Result<WeatherSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_weather(&text, &path.display().to_string())
}

pub fn read_measurements(path: &Path) -> Result<TimedMeasurements> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_measurements(&text, &path.display().to_string())
}

/// Timestamp of sample `n`, or its index when the series has no start time.
pub fn timestamp_at(start: Option<NaiveDateTime>, dt: f64, n: usize) -> String {
    match start {
        Some(s) => format_timestamp(
            s + chrono::Duration::milliseconds((dt * 1000.0).round() as i64 * n as i64),
        ),
        None => n.to_string(),
    }
}

pub fn write_weather(w: &WeatherSeries) -> String {
    let mut out = WEATHER_HEADER.join(",");
    out.push('\n');
    for (n, r) in w.records.iter().enumerate() {
        let _ = write!(out, "{},{},{}", timestamp_at(w.start, w.dt, n), r.t_ae, r.t_sky);
        for s in r.solar {
            let _ = write!(out, ",{s}");
        }
        out.push('\n');
    }
    out
}

pub fn write_measurements(m: &MeasurementSeries, start: Option<NaiveDateTime>) -> String {
    let nodes: Vec<NodeId> = m.nodes().collect();
    let mut out = String::from("timestamp");
    for n in &nodes {
        let _ = write!(out, ",node_{n}");
    }
    out.push('\n');
    for k in 0..m.len() {
        out.push_str(&timestamp_at(start, m.dt, k));
        for n in &nodes {
            let _ = write!(out, ",{}", m.value(*n, k).expect("rectangular series"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell;

    #[test]
    fn weather_round_trips_exactly() {
        let w = cell::synthetic_weather();
        let back = parse_weather(&write_weather(&w), "w.csv").unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn measurements_round_trip_exactly() {
        let mut s = BTreeMap::new();
        s.insert(NodeId(2), vec![20.1, 20.25, 1.0 / 3.0]);
        s.insert(NodeId(23), vec![21.0, 21.5, 22.0]);
        let m = MeasurementSeries::new(900.0, s).unwrap();
        let start = cell::weather_start();
        let text = write_measurements(&m, Some(start));
        assert!(text.starts_with("timestamp,node_2,node_23\n2000-03-01T00:00:00,"));
        let back = parse_measurements(&text, "m.csv").unwrap();
        assert_eq!(back.series, m);
        assert_eq!(back.start, start);
    }

    fn weather_err(text: &str) -> (usize, String) {
        match parse_weather(text, "w.csv").unwrap_err() {
            Error::Parse { line, field, .. } => (line, field),
            other => panic!("expected a parse error, got {other}"),
        }
    }

    const HEADER: &str = "timestamp,T_ae,T_sky,I_N,I_S,I_E,I_W,I_H\n";

    #[test]
    fn weather_rejects_gaps_and_disorder() {
        let gap = format!(
            "{HEADER}2000-01-01T00:00:00,1,0,0,0,0,0,0\n2000-01-01T00:15:00,1,0,0,0,0,0,0\n2000-01-01T00:45:00,1,0,0,0,0,0,0\n"
        );
        assert_eq!(weather_err(&gap), (4, "timestamp".into()));
        let back = format!(
            "{HEADER}2000-01-01T00:15:00,1,0,0,0,0,0,0\n2000-01-01T00:00:00,1,0,0,0,0,0,0\n"
        );
        assert_eq!(weather_err(&back), (3, "timestamp".into()));
    }

    #[test]
    fn weather_rejects_bad_cells() {
        let neg = format!(
            "{HEADER}2000-01-01T00:00:00,1,0,0,0,0,0,0\n2000-01-01T00:15:00,1,0,0,-5,0,0,0\n"
        );
        assert_eq!(weather_err(&neg), (3, "I_S".into()));
        let nan = format!(
            "{HEADER}2000-01-01T00:00:00,x,0,0,0,0,0,0\n2000-01-01T00:15:00,1,0,0,0,0,0,0\n"
        );
        assert_eq!(weather_err(&nan), (2, "T_ae".into()));
        assert_eq!(weather_err("time,T_ae\n").1, "header");
    }

    #[test]
    fn measurement_header_is_checked() {
        let text = "timestamp,node_0\n2000-01-01T00:00:00,1\n2000-01-01T00:15:00,1\n";
        assert!(matches!(
            parse_measurements(text, "m.csv"),
            Err(Error::Parse { line: 1, .. })
        ));
        let dup = "timestamp,node_3,node_3\n2000-01-01T00:00:00,1,1\n2000-01-01T00:15:00,1,1\n";
        assert!(parse_measurements(dup, "m.csv").is_err());
    }

    #[test]
    fn timestamp_variants() {
        let t = parse_timestamp("2000-03-01T06:15:00").unwrap();
        assert_eq!(parse_timestamp("2000-03-01T06:15"), Some(t));
        assert_eq!(parse_timestamp("2000-03-01T06:15:00Z"), Some(t));
        assert_eq!(parse_timestamp("2000-03-01 06:15:00"), Some(t));
        assert_eq!(parse_timestamp("01/03/2000"), None);
    }
}
