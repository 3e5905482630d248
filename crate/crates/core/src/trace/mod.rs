//! Activation traces: the log format, latency extraction, deadline checks
//! and timing-diagram rendering.

mod check;
mod log;
mod render;

pub use check::{check_constraints, ConstraintOutcome, ConstraintReport, Verdict};
pub use log::{parse_trace, write_trace, TraceError, TRACE_COLUMNS, TRACE_HEADER};
pub use render::{render_svg, render_text, render_text_with};

use thiserror::Error;

use crate::payload::ResponseStatus;
use crate::time::SimTime;

/// One activation of one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub instance: String,
    pub activation: u64,
    pub start: SimTime,
    pub end: SimTime,
    pub txn_id: u64,
    pub status: ResponseStatus,
}

impl TraceRecord {
    pub fn duration(&self) -> SimTime {
        self.end.saturating_sub(self.start)
    }
}

/// Sorts records into log order: by start, then instance, then activation.
pub fn sort_records(records: &mut [TraceRecord]) {
    records.sort_by(|a, b| (a.start, &a.instance, a.activation).cmp(&(b.start, &b.instance, b.activation)));
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("E-NO-INSTANCE: instance `{0}` does not appear in the trace")]
pub struct NoInstance(pub String);

/// Latest end minus earliest start over the instance's activations.
pub fn end_to_end_latency(records: &[TraceRecord], instance: &str) -> Result<SimTime, NoInstance> {
    let mut mine = records.iter().filter(|r| r.instance == instance).peekable();
    if mine.peek().is_none() {
        return Err(NoInstance(instance.to_string()));
    }
    let (first, last) = mine.fold((SimTime::MAX, SimTime::ZERO), |(lo, hi), r| (lo.min(r.start), hi.max(r.end)));
    Ok(last.saturating_sub(first))
}

/// Latest end time of the instance's activations.
pub fn final_end(records: &[TraceRecord], instance: &str) -> Option<SimTime> {
    records.iter().filter(|r| r.instance == instance).map(|r| r.end).max()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: &str, activation: u64, start: u64, end: u64) -> TraceRecord {
        TraceRecord {
            instance: instance.into(),
            activation,
            start: SimTime::from_ps(start),
            end: SimTime::from_ps(end),
            txn_id: activation,
            status: ResponseStatus::Ok,
        }
    }

    #[test]
    fn latency_spans_all_activations() {
        let trace = [rec("a", 0, 0, 10), rec("a", 1, 10, 25), rec("b", 0, 3, 4)];
        assert_eq!(end_to_end_latency(&trace, "a"), Ok(SimTime::from_ps(25)));
        assert_eq!(end_to_end_latency(&[rec("x", 0, 5, 5)], "x"), Ok(SimTime::ZERO));
        assert_eq!(end_to_end_latency(&trace, "nope"), Err(NoInstance("nope".into())));
    }

    #[test]
    fn sort_orders_by_start_then_name() {
        let mut trace = vec![rec("b", 0, 5, 6), rec("a", 1, 5, 9), rec("c", 0, 1, 2), rec("a", 0, 5, 7)];
        sort_records(&mut trace);
        let order: Vec<_> = trace.iter().map(|r| (r.instance.as_str(), r.activation)).collect();
        assert_eq!(order, [("c", 0), ("a", 0), ("a", 1), ("b", 0)]);
    }
}
