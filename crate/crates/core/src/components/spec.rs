//! Declarative descriptions of CPUs, buses, modules, instances and bindings.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use super::timing::{Bandwidth, Frequency};
use crate::payload::{Command, GenericPayload};
use crate::time::SimTime;

/// A byte address, written as a hex string (`"0x100"`) or a JSON integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Address(pub u64);

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&format_args!("{:#x}", self.0))
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)
            .map_err(|_| de::Error::custom("expected an address (integer or \"0x...\" string)"))?
        {
            Raw::Int(v) => Ok(Address(v)),
            Raw::Text(text) => {
                parse_address(&text).map(Address).ok_or_else(|| de::Error::custom(format!("invalid address `{text}`")))
            }
        }
    }
}

fn parse_address(text: &str) -> Option<u64> {
    let text = text.trim();
    match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16).ok(),
        None => text.parse().ok(),
    }
}

/// Bytes written as a hex string, e.g. `"DEADBEEF"` or `"de ad be ef"`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HexBytes(pub Vec<u8>);

impl fmt::Display for HexBytes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{b:02X}"))
    }
}

impl Serialize for HexBytes {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HexBytes {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let digits: Vec<u8> = text.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
        if !digits.len().is_multiple_of(2) {
            return Err(de::Error::custom(format!("hex string `{text}` has an odd number of digits")));
        }
        digits
            .chunks(2)
            .map(|pair| std::str::from_utf8(pair).ok().and_then(|s| u8::from_str_radix(s, 16).ok()))
            .collect::<Option<Vec<u8>>>()
            .map(HexBytes)
            .ok_or_else(|| de::Error::custom(format!("invalid hex string `{text}`")))
    }
}

/// Maps keyed by socket index. JSON object keys are strings, so the index
/// is parsed from the key text.
mod index_map {
    use std::collections::BTreeMap;

    use serde::de::{self, Deserialize, Deserializer};
    use serde::ser::{SerializeMap, Serializer};
    use serde::Serialize;

    pub fn serialize<V: Serialize, S: Serializer>(map: &BTreeMap<usize, V>, serializer: S) -> Result<S::Ok, S::Error> {
        let mut out = serializer.serialize_map(Some(map.len()))?;
        for (k, v) in map {
            out.serialize_entry(&k.to_string(), v)?;
        }
        out.end()
    }

    pub fn deserialize<'de, V, D>(deserializer: D) -> Result<BTreeMap<usize, V>, D::Error>
    where
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        let raw = BTreeMap::<String, V>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<usize>()
                    .map(|idx| (idx, v))
                    .map_err(|_| de::Error::custom(format!("socket index `{k}` is not a non-negative integer")))
            })
            .collect()
    }
}

mod optional_index_map {
    use std::collections::BTreeMap;

    use serde::de::{Deserialize, Deserializer};
    use serde::{Serialize, Serializer};

    pub fn serialize<V: Serialize, S: Serializer>(
        map: &Option<BTreeMap<usize, V>>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        match map {
            Some(map) => super::index_map::serialize(map, serializer),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, V, D>(deserializer: D) -> Result<Option<BTreeMap<usize, V>>, D::Error>
    where
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        super::index_map::deserialize(deserializer).map(Some)
    }
}

fn is_false(v: &bool) -> bool {
    !*v
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn is_one(v: &u32) -> bool {
    *v == 1
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpuSpec {
    pub name: String,
    pub frequency: Frequency,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusSpec {
    pub name: String,
    pub cpus: Vec<String>,
}

/// One line of an initiator's workload, issued `repeat` times.
///
/// WRITE data comes from `data`; with only `length` given, byte `i` is
/// `i mod 256`. When `period` is set, repetition `k` starts no earlier than
/// `k * period` after the first; otherwise repetitions run back-to-back.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransactionTemplate {
    pub command: Command,
    pub address: Address,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<HexBytes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub byte_enables: Option<HexBytes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub streaming_width: Option<usize>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub socket: usize,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub repeat: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<SimTime>,
}

impl TransactionTemplate {
    pub fn byte_length(&self) -> usize {
        match (&self.data, self.length) {
            (Some(data), _) => data.0.len(),
            (None, Some(len)) => len,
            (None, None) => 0,
        }
    }

    /// Builds the payload this template issues.
    pub fn payload(&self) -> GenericPayload {
        let len = self.byte_length();
        let address = self.address.0;
        let mut p = match self.command {
            Command::Write => {
                let data = match &self.data {
                    Some(d) => d.0.clone(),
                    None => (0..len).map(|i| i as u8).collect(),
                };
                GenericPayload::write(address, data)
            }
            Command::Read => GenericPayload::read(address, len),
            Command::Ignore => GenericPayload::ignore(address, len),
        };
        if let Some(width) = self.streaming_width {
            p = p.with_streaming_width(width);
        }
        if let Some(enables) = &self.byte_enables {
            p = p.with_byte_enables(enables.0.clone());
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitiatorSpec {
    pub name: String,
    pub delay: SimTime,
    pub sockets: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<Bandwidth>,
    /// Request direct memory access and use it where granted.
    #[serde(default, skip_serializing_if = "is_false")]
    pub dmi: bool,
    #[serde(default)]
    pub workload: Vec<TransactionTemplate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageSpec {
    pub base: Address,
    pub size: usize,
    #[serde(default)]
    pub fill: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub name: String,
    /// One nominal delay per in-socket.
    pub socket_delays: Vec<SimTime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<Bandwidth>,
    pub storage: StorageSpec,
    #[serde(default, skip_serializing_if = "is_false")]
    pub dmi: bool,
}

/// Half-open decode window `[base, limit)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AddressRange {
    pub base: Address,
    pub limit: Address,
}

impl AddressRange {
    pub fn contains(&self, address: u64) -> bool {
        self.base.0 <= address && address < self.limit.0
    }

    pub fn overlaps(&self, other: &AddressRange) -> bool {
        self.base.0 < other.limit.0 && other.base.0 < self.limit.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouterSpec {
    pub name: String,
    pub delay: SimTime,
    pub in_sockets: usize,
    pub out_sockets: usize,
    /// In-socket → out-sockets it forwards to.
    #[serde(with = "index_map")]
    pub connections: BTreeMap<usize, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "optional_index_map")]
    pub address_map: Option<BTreeMap<usize, AddressRange>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<Bandwidth>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModuleSpec {
    Initiator(InitiatorSpec),
    Target(TargetSpec),
    Router(RouterSpec),
}

impl ModuleSpec {
    pub fn name(&self) -> &str {
        match self {
            ModuleSpec::Initiator(m) => &m.name,
            ModuleSpec::Target(m) => &m.name,
            ModuleSpec::Router(m) => &m.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModuleSpec::Initiator(_) => "initiator",
            ModuleSpec::Target(_) => "target",
            ModuleSpec::Router(_) => "router",
        }
    }

    pub fn in_socket_count(&self) -> usize {
        match self {
            ModuleSpec::Initiator(_) => 0,
            ModuleSpec::Target(m) => m.socket_delays.len(),
            ModuleSpec::Router(m) => m.in_sockets,
        }
    }

    pub fn out_socket_count(&self) -> usize {
        match self {
            ModuleSpec::Initiator(m) => m.sockets,
            ModuleSpec::Target(_) => 0,
            ModuleSpec::Router(m) => m.out_sockets,
        }
    }

    pub fn bandwidth(&self) -> Option<Bandwidth> {
        match self {
            ModuleSpec::Initiator(m) => m.bandwidth,
            ModuleSpec::Target(m) => m.bandwidth,
            ModuleSpec::Router(m) => m.bandwidth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub name: String,
    pub module: String,
    pub cpu: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocketRef {
    pub instance: String,
    pub socket: usize,
}

impl fmt::Display for SocketRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.socket)
    }
}

/// Out-socket `from` drives in-socket `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Binding {
    pub from: SocketRef,
    pub to: SocketRef,
}
