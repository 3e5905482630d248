use std::fmt;

use super::{final_end, TraceRecord};
use crate::sysdesc::TimingConstraint;
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintOutcome {
    pub instance: String,
    pub max_end: SimTime,
    /// Final end time; `None` when the instance never ran.
    pub measured: Option<SimTime>,
    pub verdict: Verdict,
}

impl fmt::Display for ConstraintOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.measured {
            Some(end) => write!(
                f,
                "{} {}: end {} ps ({} ns), limit {} ps",
                self.verdict,
                self.instance,
                end.as_ps(),
                end.ns_string(),
                self.max_end.as_ps()
            ),
            None => write!(f, "{} {}: E-NO-INSTANCE (not in trace)", self.verdict, self.instance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintReport {
    pub outcomes: Vec<ConstraintOutcome>,
}

impl ConstraintReport {
    /// PASS iff every constraint passed (vacuously for none).
    pub fn verdict(&self) -> Verdict {
        if self.outcomes.iter().all(|o| o.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for outcome in &self.outcomes {
            writeln!(f, "{outcome}")?;
        }
        write!(f, "overall: {}", self.verdict())
    }
}

/// Checks each deadline against the instance's last end time.
pub fn check_constraints(records: &[TraceRecord], constraints: &[TimingConstraint]) -> ConstraintReport {
    let outcomes = constraints
        .iter()
        .map(|c| {
            let measured = final_end(records, &c.instance);
            let verdict = match measured {
                Some(end) if end <= c.max_end => Verdict::Pass,
                _ => Verdict::Fail,
            };
            ConstraintOutcome { instance: c.instance.clone(), max_end: c.max_end, measured, verdict }
        })
        .collect();
    ConstraintReport { outcomes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payload::ResponseStatus;
    use proptest::prelude::*;

    fn trace() -> Vec<TraceRecord> {
        vec![TraceRecord {
            instance: "Brake".into(),
            activation: 0,
            start: SimTime::ZERO,
            end: SimTime::from_ps(16_000),
            txn_id: 0,
            status: ResponseStatus::Ok,
        }]
    }

    fn deadline(instance: &str, ps: u64) -> TimingConstraint {
        TimingConstraint { instance: instance.into(), max_end: SimTime::from_ps(ps) }
    }

    #[test]
    fn deadline_met_and_missed() {
        let report = check_constraints(&trace(), &[deadline("Brake", 16_000)]);
        assert_eq!(report.verdict(), Verdict::Pass);
        assert_eq!(report.outcomes[0].measured, Some(SimTime::from_ps(16_000)));
        assert_eq!(check_constraints(&trace(), &[deadline("Brake", 15_000)]).verdict(), Verdict::Fail);
    }

    #[test]
    fn vacuous_and_unknown() {
        assert_eq!(check_constraints(&trace(), &[]).verdict(), Verdict::Pass);
        let report = check_constraints(&trace(), &[deadline("Ghost", u64::MAX)]);
        assert_eq!(report.verdict(), Verdict::Fail);
        assert!(report.to_string().contains("E-NO-INSTANCE"));
    }

    proptest! {
        #[test]
        fn loosening_never_breaks_a_pass(limits in prop::collection::vec(0u64..40_000, 0..5), slack in 0u64..10_000) {
            let tight: Vec<_> = limits.iter().map(|&l| deadline("Brake", l)).collect();
            let loose: Vec<_> = limits.iter().map(|&l| deadline("Brake", l + slack)).collect();
            if check_constraints(&trace(), &tight).verdict() == Verdict::Pass {
                prop_assert_eq!(check_constraints(&trace(), &loose).verdict(), Verdict::Pass);
            }
            for (t, l) in check_constraints(&trace(), &tight).outcomes.iter().zip(check_constraints(&trace(), &loose).outcomes.iter()) {
                prop_assert!(!(t.verdict == Verdict::Pass && l.verdict == Verdict::Fail));
            }
        }
    }
}
