//! The trace log: a version line followed by CSV rows.
//!
//! ```text
//! # tlm-forge-trace v1
//! instance,activation,start_ps,end_ps,txn_id,status
//! Brake,0,0,16000,0,OK
//! ```

use std::collections::HashSet;

use thiserror::Error;

use super::{sort_records, TraceRecord};
use crate::payload::ResponseStatus;
use crate::time::SimTime;

pub const TRACE_HEADER: &str = "# tlm-forge-trace v1";
pub const TRACE_COLUMNS: [&str; 6] = ["instance", "activation", "start_ps", "end_ps", "txn_id", "status"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("E-TRACE-SYNTAX: line {line}: {message}")]
pub struct TraceError {
    pub line: u64,
    pub message: String,
}

fn syntax(line: u64, message: impl Into<String>) -> TraceError {
    TraceError { line, message: message.into() }
}

/// Renders records in log order (by start, then instance).
pub fn write_trace(records: &[TraceRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(TRACE_COLUMNS).expect("in-memory write");
    for r in &sorted {
        writer
            .write_record([
                r.instance.as_str(),
                &r.activation.to_string(),
                &r.start.as_ps().to_string(),
                &r.end.as_ps().to_string(),
                &r.txn_id.to_string(),
                r.status.as_str(),
            ])
            .expect("in-memory write");
    }
    let body = String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 fields");
    format!("{TRACE_HEADER}\n{body}")
}

/// Parses a trace log, enforcing `start <= end`, terminal statuses and
/// unique `(instance, activation)` pairs.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>, TraceError> {
    let (first, body) = text.split_once('\n').unwrap_or((text, ""));
    if first.trim_end_matches('\r') != TRACE_HEADER {
        return Err(syntax(1, format!("expected header `{TRACE_HEADER}`")));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let columns = reader.headers().map_err(|e| syntax(2, e.to_string()))?;
    if columns.iter().ne(TRACE_COLUMNS) {
        return Err(syntax(2, format!("expected columns `{}`", TRACE_COLUMNS.join(","))));
    }
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) + 1;
            syntax(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line()) + 1;
        let number = |i: usize| -> Result<u64, TraceError> {
            row[i]
                .trim()
                .parse::<u64>()
                .map_err(|_| syntax(line, format!("{} `{}` is not an unsigned integer", TRACE_COLUMNS[i], &row[i])))
        };
        let record = TraceRecord {
            instance: row[0].to_string(),
            activation: number(1)?,
            start: SimTime::from_ps(number(2)?),
            end: SimTime::from_ps(number(3)?),
            txn_id: number(4)?,
            status: row[5].trim().parse::<ResponseStatus>().map_err(|e| syntax(line, e))?,
        };
        if record.instance.is_empty() {
            return Err(syntax(line, "empty instance name"));
        }
        if record.end < record.start {
            return Err(syntax(
                line,
                format!("end {} ps precedes start {} ps", record.end.as_ps(), record.start.as_ps()),
            ));
        }
        if record.status == ResponseStatus::Incomplete {
            return Err(syntax(line, "trace rows must carry a terminal status"));
        }
        if !seen.insert((record.instance.clone(), record.activation)) {
            return Err(syntax(line, format!("duplicate activation {} of `{}`", record.activation, record.instance)));
        }
        records.push(record);
    }
    Ok(records)
}
