//! Transaction-level virtual-platform simulator.
//!
//! A [`sysdesc::SystemDescription`] declares CPUs, virtual buses, module
//! specs, instances and socket bindings. [`sysdesc::elaborate`] turns it into
//! a [`components::Model`] whose simulation yields a trace of per-instance
//! activations; [`trace`] renders, checks and serializes those traces and
//! [`codegen`] exports the description as SystemC TLM-2.0 source text.

pub mod codegen;
pub mod components;
pub mod kernel;
pub mod payload;
pub mod sysdesc;
pub mod time;
pub mod trace;
pub mod transport;

pub use components::{Model, SimulationResult};
pub use payload::{Command, GenericPayload, ResponseStatus};
pub use sysdesc::{elaborate, parse_description, validate_description, SystemDescription};
pub use time::SimTime;
pub use trace::TraceRecord;
