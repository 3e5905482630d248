//! The system-description document: parsing, serialization, validation and
//! elaboration into an executable model.
//!
//! A description is a JSON object with the keys `cpus` (required), `buses`,
//! `modules`, `instances`, `bindings`, `constraints` and `options`. Delays
//! and frequencies are strings with units (`"10ns"`, `"4GHz"`). See
//! `docs/description-format.md` for the full grammar.

mod validate;

pub use validate::{validate_description, Diagnostic, DiagnosticCode};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{Binding, BusSpec, CpuSpec, Instance, Model, ModuleSpec};
use crate::kernel::DEFAULT_EVENT_LIMIT;
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescription {
    pub cpus: Vec<CpuSpec>,
    #[serde(default)]
    pub buses: Vec<BusSpec>,
    #[serde(default)]
    pub modules: Vec<ModuleSpec>,
    #[serde(default)]
    pub instances: Vec<Instance>,
    #[serde(default)]
    pub bindings: Vec<Binding>,
    #[serde(default)]
    pub constraints: Vec<TimingConstraint>,
    #[serde(default)]
    pub options: Options,
}

/// Deadline on the end time of an instance's last activation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingConstraint {
    pub instance: String,
    pub max_end: SimTime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Temporal-decoupling bound; zero keeps every activity synchronized.
    #[serde(default)]
    pub global_quantum: SimTime,
    #[serde(default = "default_event_limit")]
    pub event_limit: u64,
    /// Suggested trace file name. Informational; tools write where told.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

fn default_event_limit() -> u64 {
    DEFAULT_EVENT_LIMIT
}

impl Default for Options {
    fn default() -> Self {
        Options { global_quantum: SimTime::ZERO, event_limit: DEFAULT_EVENT_LIMIT, trace: None }
    }
}

impl SystemDescription {
    pub fn module(&self, name: &str) -> Option<&ModuleSpec> {
        self.modules.iter().find(|m| m.name() == name)
    }

    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.name == name)
    }

    pub fn cpu(&self, name: &str) -> Option<&CpuSpec> {
        self.cpus.iter().find(|c| c.name == name)
    }

    /// Pretty-printed JSON that [`parse_description`] reads back unchanged.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("descriptions always serialize");
        text.push('\n');
        text
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseCode {
    Syntax,
    Type,
    Missing,
}

impl ParseCode {
    pub fn code(self) -> &'static str {
        match self {
            ParseCode::Syntax => "E-SYNTAX",
            ParseCode::Type => "E-TYPE",
            ParseCode::Missing => "E-MISSING",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseDiagnostic {
    pub code: ParseCode,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.column, self.code.code(), self.message)
    }
}

/// Parses a description document. The first problem found is reported
/// with its position.
pub fn parse_description(text: &str) -> Result<SystemDescription, ParseDiagnostic> {
    let source = if text.trim().is_empty() { "{}" } else { text };
    serde_json::from_str(source).map_err(|err| {
        let code = match err.classify() {
            serde_json::error::Category::Data => {
                if err.to_string().starts_with("missing field") {
                    ParseCode::Missing
                } else {
                    ParseCode::Type
                }
            }
            _ => ParseCode::Syntax,
        };
        let full = err.to_string();
        let message = match full.rfind(" at line ") {
            Some(at) => full[..at].to_string(),
            None => full,
        };
        ParseDiagnostic { code, line: err.line().max(1), column: err.column().max(1), message }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElaborationError {
    #[error("description has {} validation error(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Diagnostic>),
    #[error("E-TIME-OVERFLOW: scaled delay of `{0}` does not fit in simulated time")]
    Overflow(String),
}

/// Builds the executable model. Refuses descriptions that do not validate.
pub fn elaborate(desc: &SystemDescription) -> Result<Model, ElaborationError> {
    let diagnostics = validate_description(desc);
    if !diagnostics.is_empty() {
        return Err(ElaborationError::Invalid(diagnostics));
    }
    Model::from_description(desc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_missing_cpus() {
        for text in ["", "  \n", "{}"] {
            let err = parse_description(text).unwrap_err();
            assert_eq!(err.code, ParseCode::Missing, "{text:?}");
            assert!(err.message.contains("cpus"), "{}", err.message);
        }
    }

    #[test]
    fn negative_frequency_is_a_type_error() {
        let err = parse_description(r#"{"cpus": [{"name": "c", "frequency": "-1"}]}"#).unwrap_err();
        assert_eq!(err.code, ParseCode::Type);
        assert_eq!(err.line, 1);
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_description("{\n  \"cpus\": [,]\n}").unwrap_err();
        assert_eq!(err.code, ParseCode::Syntax);
        assert_eq!((err.line, err.column), (2, 12));
        assert!(err.to_string().starts_with("2:12: E-SYNTAX: "));
    }

    #[test]
    fn unknown_keys_are_type_errors() {
        let err = parse_description(r#"{"cpus": [], "gpus": []}"#).unwrap_err();
        assert_eq!(err.code, ParseCode::Type);
    }

    #[test]
    fn options_default() {
        let d = parse_description(r#"{"cpus": []}"#).unwrap();
        assert_eq!(d.options, Options::default());
        assert_eq!(d.options.event_limit, 10_000_000);
    }
}
