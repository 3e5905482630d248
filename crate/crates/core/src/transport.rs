//! Non-blocking base-protocol state tracking and direct-memory grants.
//!
//! Blocking transport, DMI requests and debug transport are executed by the
//! elaborated model (see [`crate::components::Model`]); this module holds
//! the interface-level types they share.
//!
//! Base protocol, per connection (`fw` = initiator→target call,
//! `bw` = target→initiator call):
//!
//! | state          | step          | status    | next           |
//! |----------------|---------------|-----------|----------------|
//! | idle           | fw BEGIN_REQ  | ACCEPTED  | requested      |
//! | requested      | bw END_REQ    | ACCEPTED  | request ended  |
//! | requested      | bw BEGIN_RESP | ACCEPTED  | responding     |
//! | request ended  | bw BEGIN_RESP | ACCEPTED  | responding     |
//! | responding     | fw END_RESP   | COMPLETED | idle           |
//!
//! Every other combination is a protocol error. `BEGIN_RESP` straight after
//! `BEGIN_REQ` carries an implicit `END_REQ`. A callee may also answer any
//! legal step with `COMPLETED`, which returns the connection to idle.

use std::fmt;

use thiserror::Error;

use crate::components::SharedStorage;
use crate::payload::{Command, Phase};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub const ALL: [Direction; 2] = [Direction::Forward, Direction::Backward];

    fn opposite(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyncStatus {
    Accepted,
    Updated,
    Completed,
}

/// How the callee answered an nb transport call. `Updated` carries the phase
/// the callee moved the transaction to on the return path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reply {
    Accepted,
    Updated(Phase),
    Completed,
}

/// Per-connection protocol bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProtocolState {
    pub outstanding_request: bool,
    pub outstanding_response: bool,
    pub last_phase: Option<Phase>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("E-PROTO: {direction:?} {phase:?} is illegal in state {state}")]
pub struct ProtocolError {
    pub state: ProtocolState,
    pub direction: Direction,
    pub phase: Phase,
}

impl fmt::Display for ProtocolState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.outstanding_request {
            "requested"
        } else if self.outstanding_response {
            "responding"
        } else if self.awaiting_response() {
            "request-ended"
        } else {
            "idle"
        };
        f.write_str(name)
    }
}

impl ProtocolState {
    pub fn idle() -> Self {
        Self::default()
    }

    pub fn is_idle(&self) -> bool {
        !self.outstanding_request && !self.outstanding_response && !self.awaiting_response()
    }

    fn awaiting_response(&self) -> bool {
        !self.outstanding_request && !self.outstanding_response && self.last_phase == Some(Phase::EndReq)
    }

    fn after(self, phase: Phase, request: bool, response: bool) -> Self {
        ProtocolState { outstanding_request: request, outstanding_response: response, last_phase: Some(phase) }
    }
}

/// One step of the base-protocol table; the callee answers with the
/// table's default status.
pub fn nb_step(
    state: ProtocolState,
    direction: Direction,
    phase: Phase,
) -> Result<(SyncStatus, ProtocolState), ProtocolError> {
    use Direction::{Backward, Forward};
    let error = ProtocolError { state, direction, phase };
    let next = match (direction, phase) {
        (Forward, Phase::BeginReq) if state.is_idle() => (SyncStatus::Accepted, state.after(phase, true, false)),
        (Backward, Phase::EndReq) if state.outstanding_request => {
            (SyncStatus::Accepted, state.after(phase, false, false))
        }
        (Backward, Phase::BeginResp) if state.outstanding_request || state.awaiting_response() => {
            (SyncStatus::Accepted, state.after(phase, false, true))
        }
        (Forward, Phase::EndResp) if state.outstanding_response => {
            (SyncStatus::Completed, state.after(phase, false, false))
        }
        _ => return Err(error),
    };
    Ok(next)
}

/// Like [`nb_step`], with an explicit answer from the callee. `Updated`
/// applies the returned phase as a step in the opposite direction;
/// `Completed` finishes the transaction early.
pub fn nb_step_reply(
    state: ProtocolState,
    direction: Direction,
    phase: Phase,
    reply: Reply,
) -> Result<(SyncStatus, ProtocolState), ProtocolError> {
    let (status, next) = nb_step(state, direction, phase)?;
    match reply {
        Reply::Accepted => Ok((status, next)),
        Reply::Updated(returned) => {
            let (_, after) = nb_step(next, direction.opposite(), returned)?;
            let status = if after.is_idle() { SyncStatus::Completed } else { SyncStatus::Updated };
            Ok((status, after))
        }
        Reply::Completed => Ok((
            SyncStatus::Completed,
            ProtocolState { outstanding_request: false, outstanding_response: false, last_phase: Some(phase) },
        )),
    }
}

/// Whether folding [`nb_step`] over `seq` from idle never errors.
pub fn protocol_legal(seq: &[(Direction, Phase)]) -> bool {
    seq.iter()
        .try_fold(ProtocolState::idle(), |state, &(dir, phase)| nb_step(state, dir, phase).map(|(_, s)| s))
        .is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmiAccess {
    Read,
    Write,
    ReadWrite,
}

impl DmiAccess {
    pub fn permits(self, command: Command) -> bool {
        matches!(
            (self, command),
            (DmiAccess::ReadWrite, Command::Read | Command::Write)
                | (DmiAccess::Read, Command::Read)
                | (DmiAccess::Write, Command::Write)
        )
    }
}

/// A direct-memory grant (or refusal) for the inclusive range
/// `[start_address, end_address]`.
#[derive(Debug, Clone)]
pub struct DmiDescriptor {
    pub granted: bool,
    pub start_address: u64,
    pub end_address: u64,
    pub access: DmiAccess,
    pub read_latency: SimTime,
    pub write_latency: SimTime,
    pub storage: Option<SharedStorage>,
}

impl DmiDescriptor {
    pub fn denied(start_address: u64, end_address: u64) -> Self {
        DmiDescriptor {
            granted: false,
            start_address,
            end_address,
            access: DmiAccess::ReadWrite,
            read_latency: SimTime::ZERO,
            write_latency: SimTime::ZERO,
            storage: None,
        }
    }

    /// Refusal covering the whole address space.
    pub fn denied_everywhere() -> Self {
        Self::denied(0, u64::MAX)
    }

    /// Whether this grant covers `[first, last]` for `command`.
    pub fn covers(&self, first: u64, last: u64, command: Command) -> bool {
        self.granted && self.start_address <= first && last <= self.end_address && self.access.permits(command)
    }

    pub fn latency(&self, command: Command) -> SimTime {
        match command {
            Command::Write => self.write_latency,
            _ => self.read_latency,
        }
    }
}
