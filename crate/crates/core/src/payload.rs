//! The generic payload and the enumerations that travel with it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Command {
    Read,
    Write,
    Ignore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResponseStatus {
    Incomplete,
    Ok,
    AddressError,
    CommandError,
    BurstError,
    ByteEnableError,
    GenericError,
}

impl ResponseStatus {
    pub const ALL: [ResponseStatus; 7] = [
        ResponseStatus::Incomplete,
        ResponseStatus::Ok,
        ResponseStatus::AddressError,
        ResponseStatus::CommandError,
        ResponseStatus::BurstError,
        ResponseStatus::ByteEnableError,
        ResponseStatus::GenericError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResponseStatus::Incomplete => "INCOMPLETE",
            ResponseStatus::Ok => "OK",
            ResponseStatus::AddressError => "ADDRESS_ERROR",
            ResponseStatus::CommandError => "COMMAND_ERROR",
            ResponseStatus::BurstError => "BURST_ERROR",
            ResponseStatus::ByteEnableError => "BYTE_ENABLE_ERROR",
            ResponseStatus::GenericError => "GENERIC_ERROR",
        }
    }

    pub fn is_ok(self) -> bool {
        self == ResponseStatus::Ok
    }
}

impl fmt::Display for ResponseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResponseStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResponseStatus::ALL
            .into_iter()
            .find(|status| status.as_str() == s)
            .ok_or_else(|| format!("unknown response status `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    BeginReq,
    EndReq,
    BeginResp,
    EndResp,
}

impl Phase {
    pub const ALL: [Phase; 4] = [Phase::BeginReq, Phase::EndReq, Phase::BeginResp, Phase::EndResp];
}

/// Stable codes reported by [`validate_payload`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PayloadCode {
    /// `data_length` exceeds the data buffer.
    DataLength,
    /// `streaming_width` is zero.
    StreamingZero,
    /// `data_length` is not a multiple of `streaming_width`.
    StreamingDivide,
    /// A byte enable other than `0x00` / `0xFF`.
    EnableValue,
    /// `byte_enable_length` is zero or exceeds the enable buffer.
    EnableLength,
}

impl PayloadCode {
    pub fn code(self) -> &'static str {
        match self {
            PayloadCode::DataLength => "E-DATA-LEN",
            PayloadCode::StreamingZero => "E-SW-ZERO",
            PayloadCode::StreamingDivide => "E-SW-DIVIDE",
            PayloadCode::EnableValue => "E-ENABLE-VALUE",
            PayloadCode::EnableLength => "E-ENABLE-LEN",
        }
    }

    /// Status a target answers with when it receives a payload carrying
    /// this defect.
    pub fn response_status(self) -> ResponseStatus {
        match self {
            PayloadCode::DataLength => ResponseStatus::GenericError,
            PayloadCode::StreamingZero | PayloadCode::StreamingDivide => ResponseStatus::BurstError,
            PayloadCode::EnableValue | PayloadCode::EnableLength => ResponseStatus::ByteEnableError,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadDiagnostic {
    pub code: PayloadCode,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for PayloadDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.code.code(), self.field, self.message)
    }
}

/// The transaction object passed from initiators to targets.
///
/// `byte_enables == None` enables every byte. A `streaming_width` equal to
/// `data_length` means no streaming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericPayload {
    pub command: Command,
    pub address: u64,
    pub data: Vec<u8>,
    pub data_length: usize,
    pub byte_enables: Option<Vec<u8>>,
    pub byte_enable_length: usize,
    pub streaming_width: usize,
    pub dmi_allowed: bool,
    pub response_status: ResponseStatus,
    /// Extension kind → opaque value. Built-in components never interpret
    /// these; they are carried along and copied with the payload.
    pub extensions: BTreeMap<String, Vec<u8>>,
}

impl GenericPayload {
    fn new(command: Command, address: u64, data: Vec<u8>) -> Self {
        let len = data.len();
        GenericPayload {
            command,
            address,
            data,
            data_length: len,
            byte_enables: None,
            byte_enable_length: 0,
            streaming_width: len.max(1),
            dmi_allowed: false,
            response_status: ResponseStatus::Incomplete,
            extensions: BTreeMap::new(),
        }
    }

    pub fn write(address: u64, data: Vec<u8>) -> Self {
        Self::new(Command::Write, address, data)
    }

    pub fn read(address: u64, length: usize) -> Self {
        Self::new(Command::Read, address, vec![0; length])
    }

    pub fn ignore(address: u64, length: usize) -> Self {
        Self::new(Command::Ignore, address, vec![0; length])
    }

    pub fn with_streaming_width(mut self, width: usize) -> Self {
        self.streaming_width = width;
        self
    }

    pub fn with_byte_enables(mut self, enables: Vec<u8>) -> Self {
        self.byte_enable_length = enables.len();
        self.byte_enables = Some(enables);
        self
    }

    pub fn with_extension(mut self, kind: impl Into<String>, value: Vec<u8>) -> Self {
        self.extensions.insert(kind.into(), value);
        self
    }

    /// Whether beat `index` is enabled.
    pub fn beat_enabled(&self, index: usize) -> bool {
        match &self.byte_enables {
            None => true,
            Some(enables) => enables[index % self.byte_enable_length] == 0xFF,
        }
    }

    /// First payload defect, if any, mapped to the error status a target
    /// answers with.
    pub fn defect_status(&self) -> Option<ResponseStatus> {
        validate_payload(self).first().map(|d| d.code.response_status())
    }
}

/// Checks every generic-payload invariant; an empty result means valid.
pub fn validate_payload(p: &GenericPayload) -> Vec<PayloadDiagnostic> {
    let mut out = Vec::new();
    if p.data_length > p.data.len() {
        out.push(PayloadDiagnostic {
            code: PayloadCode::DataLength,
            field: "data_length",
            message: format!("data_length {} exceeds data buffer of {} bytes", p.data_length, p.data.len()),
        });
    }
    if p.streaming_width == 0 {
        out.push(PayloadDiagnostic {
            code: PayloadCode::StreamingZero,
            field: "streaming_width",
            message: "streaming_width must be positive".into(),
        });
    } else if !p.data_length.is_multiple_of(p.streaming_width) {
        out.push(PayloadDiagnostic {
            code: PayloadCode::StreamingDivide,
            field: "streaming_width",
            message: format!(
                "data_length {} is not a multiple of streaming_width {}",
                p.data_length, p.streaming_width
            ),
        });
    }
    if let Some(enables) = &p.byte_enables {
        if let Some((i, b)) = enables.iter().enumerate().find(|(_, b)| **b != 0x00 && **b != 0xFF) {
            out.push(PayloadDiagnostic {
                code: PayloadCode::EnableValue,
                field: "byte_enables",
                message: format!("byte enable {i} is {b:#04x}; only 0x00 and 0xFF are allowed"),
            });
        }
        if p.byte_enable_length == 0 || p.byte_enable_length > enables.len() {
            out.push(PayloadDiagnostic {
                code: PayloadCode::EnableLength,
                field: "byte_enable_length",
                message: format!("byte_enable_length {} must be in 1..={}", p.byte_enable_length, enables.len()),
            });
        }
    }
    out
}

/// Storage-disjoint copy with the response status reset to `INCOMPLETE`.
pub fn deep_copy_payload(p: &GenericPayload) -> GenericPayload {
    GenericPayload { response_status: ResponseStatus::Incomplete, ..p.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn codes(p: &GenericPayload) -> Vec<&'static str> {
        validate_payload(p).iter().map(|d| d.code.code()).collect()
    }

    #[test]
    fn valid_write_has_no_diagnostics() {
        let p = GenericPayload::write(0, vec![1, 2, 3, 4]).with_byte_enables(vec![0xFF; 4]);
        assert!(codes(&p).is_empty());
        assert_eq!(p.response_status, ResponseStatus::Incomplete);
    }

    #[test]
    fn streaming_width_must_divide() {
        let p = GenericPayload::write(0, vec![0; 4]).with_streaming_width(3);
        assert_eq!(codes(&p), ["E-SW-DIVIDE"]);
    }

    #[test]
    fn enable_bytes_are_all_or_nothing() {
        let p = GenericPayload::write(0, vec![0; 4]).with_byte_enables(vec![0xFF, 0x7F]);
        assert_eq!(codes(&p), ["E-ENABLE-VALUE"]);
    }

    #[test]
    fn zero_streaming_width_and_overlong_length() {
        let p = GenericPayload::write(0, vec![0; 4]).with_streaming_width(0);
        assert_eq!(codes(&p), ["E-SW-ZERO"]);
        let mut p = GenericPayload::write(0, vec![0; 4]);
        p.data_length = 8;
        p.streaming_width = 8;
        assert_eq!(codes(&p), ["E-DATA-LEN"]);
        let mut p = GenericPayload::write(0, vec![0; 4]).with_byte_enables(vec![0xFF; 2]);
        p.byte_enable_length = 3;
        assert_eq!(codes(&p), ["E-ENABLE-LEN"]);
    }

    #[test]
    fn defects_map_to_error_statuses() {
        let p = GenericPayload::write(0, vec![0; 4]).with_streaming_width(3);
        assert_eq!(p.defect_status(), Some(ResponseStatus::BurstError));
        let p = GenericPayload::write(0, vec![0; 4]).with_byte_enables(vec![0x01]);
        assert_eq!(p.defect_status(), Some(ResponseStatus::ByteEnableError));
    }

    #[test]
    fn deep_copy_resets_status_and_keeps_extensions() {
        let mut p = GenericPayload::write(0x40, vec![9, 8]).with_extension("burst.kind", vec![1]);
        p.response_status = ResponseStatus::Ok;
        let mut copy = deep_copy_payload(&p);
        assert_eq!(copy.response_status, ResponseStatus::Incomplete);
        assert_eq!(copy.extensions.get("burst.kind"), Some(&vec![1]));
        copy.data[0] = 0;
        copy.extensions.insert("burst.kind".into(), vec![2]);
        assert_eq!(p.data, vec![9, 8]);
        assert_eq!(p.extensions["burst.kind"], vec![1]);
        assert_eq!(GenericPayload { response_status: ResponseStatus::Ok, ..copy.clone() }.address, p.address);
    }

    fn valid_payload() -> impl Strategy<Value = GenericPayload> {
        (1usize..=4, 1usize..=4, prop::collection::vec(any::<bool>(), 1..=4), any::<bool>(), any::<u64>()).prop_map(
            |(width, beats, enables, use_enables, address)| {
                let len = width * beats;
                let p = GenericPayload::write(address, (0..len as u8).collect()).with_streaming_width(width);
                if use_enables {
                    p.with_byte_enables(enables.iter().map(|&e| if e { 0xFF } else { 0x00 }).collect())
                } else {
                    p
                }
            },
        )
    }

    proptest! {
        #[test]
        fn valid_payloads_validate_clean(p in valid_payload()) {
            prop_assert!(validate_payload(&p).is_empty());
        }

        #[test]
        fn single_violation_yields_matching_code(p in valid_payload(), which in 0usize..5) {
            let mut p = p;
            let expected = match which {
                0 => { p.data_length = p.data.len() + 1; p.streaming_width = p.data_length; "E-DATA-LEN" }
                1 => { p.streaming_width = 0; "E-SW-ZERO" }
                2 => { p.data.push(0); p.data_length += 1; p.streaming_width = p.data_length + 1; "E-SW-DIVIDE" }
                3 => { p = p.with_byte_enables(vec![0xFF, 0x80]); "E-ENABLE-VALUE" }
                _ => { p = p.with_byte_enables(vec![0xFF]); p.byte_enable_length = 0; "E-ENABLE-LEN" }
            };
            prop_assert_eq!(codes(&p), vec![expected]);
        }

        #[test]
        fn deep_copy_is_disjoint(p in valid_payload(), byte in any::<u8>()) {
            let original = p.clone();
            let mut copy = deep_copy_payload(&p);
            prop_assert_eq!(&GenericPayload { response_status: p.response_status, ..copy.clone() }, &original);
            if let Some(first) = copy.data.first_mut() { *first = byte; }
            copy.address = copy.address.wrapping_add(1);
            prop_assert_eq!(&p, &original);
        }
    }
}
