//! CPU frequency scaling and bandwidth serialization latency.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::time::{parse_decimal, SimTime, TimeOverflow};

const PS_PER_S: u128 = 1_000_000_000_000;
const HZ_PER_GHZ: u128 = 1_000_000_000;

/// A positive clock frequency in whole hertz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frequency(u64);

const FREQ_UNITS: [(&str, u64); 4] = [("GHz", 1_000_000_000), ("MHz", 1_000_000), ("kHz", 1_000), ("Hz", 1)];

impl Frequency {
    pub fn from_hz(hz: u64) -> Option<Self> {
        (hz > 0).then_some(Frequency(hz))
    }

    pub fn from_ghz(ghz: u64) -> Option<Self> {
        ghz.checked_mul(1_000_000_000).and_then(Self::from_hz)
    }

    pub fn hz(self) -> u64 {
        self.0
    }

    /// Multiplies the frequency by `factor`, if it stays representable.
    pub fn scaled(self, factor: u64) -> Option<Self> {
        self.0.checked_mul(factor).and_then(Self::from_hz)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (unit, scale) =
            FREQ_UNITS.iter().find(|(_, scale)| self.0.is_multiple_of(*scale)).expect("Hz divides everything");
        write!(f, "{}{}", self.0 / scale, unit)
    }
}

impl FromStr for Frequency {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("invalid frequency `{s}` (expected a positive value such as \"4GHz\" or \"250MHz\")");
        let (value, unit) = split_unit(s).ok_or_else(err)?;
        let scale =
            FREQ_UNITS.iter().find(|(u, _)| u.eq_ignore_ascii_case(unit)).map(|(_, scale)| *scale).ok_or_else(err)?;
        let hz = exact_scale(value, scale as u128).ok_or_else(err)?;
        u64::try_from(hz).ok().and_then(Frequency::from_hz).ok_or_else(err)
    }
}

/// A positive transfer rate in whole bytes per second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bandwidth(u64);

const BW_UNITS: [(&str, u64); 7] = [
    ("B/ns", 1_000_000_000),
    ("GB/s", 1_000_000_000),
    ("B/us", 1_000_000),
    ("MB/s", 1_000_000),
    ("B/ms", 1_000),
    ("KB/s", 1_000),
    ("B/s", 1),
];

impl Bandwidth {
    pub fn from_bytes_per_sec(bps: u64) -> Option<Self> {
        (bps > 0).then_some(Bandwidth(bps))
    }

    pub fn from_bytes_per_ns(bpn: u64) -> Option<Self> {
        bpn.checked_mul(1_000_000_000).and_then(Self::from_bytes_per_sec)
    }

    pub fn bytes_per_sec(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (unit, scale) =
            BW_UNITS.iter().find(|(_, scale)| self.0.is_multiple_of(*scale)).expect("B/s divides everything");
        write!(f, "{}{}", self.0 / scale, unit)
    }
}

impl FromStr for Bandwidth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || format!("invalid bandwidth `{s}` (expected a positive value such as \"512B/ns\" or \"4GB/s\")");
        let (value, unit) = split_unit(s).ok_or_else(err)?;
        let scale = BW_UNITS.iter().find(|(u, _)| *u == unit).map(|(_, scale)| *scale).ok_or_else(err)?;
        let bps = exact_scale(value, scale as u128).ok_or_else(err)?;
        u64::try_from(bps).ok().and_then(Bandwidth::from_bytes_per_sec).ok_or_else(err)
    }
}

fn split_unit(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    let at = s.find(|c: char| c.is_ascii_alphabetic())?;
    let (value, unit) = s.split_at(at);
    Some((value.trim(), unit.trim()))
}

/// `value * scale` when it is a whole number.
fn exact_scale(value: &str, scale: u128) -> Option<u128> {
    let (mantissa, digits) = parse_decimal(value)?;
    let scaled = mantissa.checked_mul(scale)?;
    let divisor = 10u128.checked_pow(digits)?;
    (scaled % divisor == 0).then(|| scaled / divisor)
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let text = String::deserialize(deserializer)?;
                text.parse().map_err(de::Error::custom)
            }
        }
    };
}

string_serde!(Frequency);
string_serde!(Bandwidth);

/// Scales a delay declared in cycles-at-1-GHz to a CPU running at
/// `frequency`: `nominal / f_GHz`, rounded to the nearest picosecond with
/// ties away from zero.
pub fn effective_delay(nominal: SimTime, frequency: Frequency) -> Result<SimTime, TimeOverflow> {
    let numerator = nominal.as_ps() as u128 * HZ_PER_GHZ;
    let hz = frequency.hz() as u128;
    let rounded = (2 * numerator + hz) / (2 * hz);
    u64::try_from(rounded).map(SimTime::from_ps).map_err(|_| TimeOverflow { lhs: nominal.as_ps(), rhs: u64::MAX })
}

/// Serialization latency of `length` bytes: `ceil(length / bandwidth)` in
/// picoseconds, zero when the bandwidth is unlimited.
pub fn transfer_time(length: usize, bandwidth: Option<Bandwidth>) -> Result<SimTime, TimeOverflow> {
    let Some(bw) = bandwidth else {
        return Ok(SimTime::ZERO);
    };
    let numerator = length as u128 * PS_PER_S;
    let bps = bw.bytes_per_sec() as u128;
    u64::try_from(numerator.div_ceil(bps))
        .map(SimTime::from_ps)
        .map_err(|_| TimeOverflow { lhs: length as u64, rhs: u64::MAX })
}
