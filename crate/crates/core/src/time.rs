//! Simulated time in integer picoseconds.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

/// Simulated time, counted in picoseconds.
///
/// Arithmetic never wraps: `checked_add` reports overflow and the `Add`
/// impl panics on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("simulated time overflow: {lhs} ps + {rhs} ps")]
pub struct TimeOverflow {
    pub lhs: u64,
    pub rhs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid duration `{0}` (expected e.g. \"10ns\", \"500ps\", \"1us\")")]
pub struct ParseTimeError(pub String);

const UNITS: [(&str, u64); 5] =
    [("s", 1_000_000_000_000), ("ms", 1_000_000_000), ("us", 1_000_000), ("ns", 1_000), ("ps", 1)];

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    pub const MAX: SimTime = SimTime(u64::MAX);

    pub const fn from_ps(ps: u64) -> Self {
        SimTime(ps)
    }

    pub const fn from_ns(ns: u64) -> Self {
        SimTime(ns * 1_000)
    }

    pub const fn as_ps(self) -> u64 {
        self.0
    }

    pub fn checked_add(self, rhs: SimTime) -> Result<SimTime, TimeOverflow> {
        self.0.checked_add(rhs.0).map(SimTime).ok_or(TimeOverflow { lhs: self.0, rhs: rhs.0 })
    }

    pub fn saturating_sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }

    /// Formats the time in nanoseconds with up to three decimals,
    /// trailing zeros trimmed (`16000` → `"16"`, `1500` → `"1.5"`).
    pub fn ns_string(self) -> String {
        let whole = self.0 / 1_000;
        let frac = self.0 % 1_000;
        if frac == 0 {
            whole.to_string()
        } else {
            let digits = format!("{frac:03}");
            format!("{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl Add for SimTime {
    type Output = SimTime;

    fn add(self, rhs: SimTime) -> SimTime {
        match self.checked_add(rhs) {
            Ok(t) => t,
            Err(e) => panic!("{e}"),
        }
    }
}

/// Prints the largest unit that represents the value exactly, e.g. `10ns`,
/// `500ps`, `1us`. Parsing the output yields the same value.
impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("0ps");
        }
        for (unit, scale) in UNITS {
            if self.0.is_multiple_of(scale) {
                return write!(f, "{}{}", self.0 / scale, unit);
            }
        }
        unreachable!("ps divides everything")
    }
}

impl FromStr for SimTime {
    type Err = ParseTimeError;

    /// Accepts a non-negative decimal number followed by one of
    /// `s`, `ms`, `us`, `ns`, `ps`. The value must be a whole number of
    /// picoseconds.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseTimeError(s.to_string());
        let trimmed = s.trim();
        let split = trimmed.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(err)?;
        let (number, unit) = trimmed.split_at(split);
        let scale = UNITS.iter().find(|(u, _)| *u == unit.trim()).map(|(_, scale)| *scale).ok_or_else(err)?;
        let (mantissa, exp10) = parse_decimal(number.trim()).ok_or_else(err)?;
        let scaled = mantissa.checked_mul(scale as u128).ok_or_else(err)?;
        let divisor = 10u128.checked_pow(exp10).ok_or_else(err)?;
        if scaled % divisor != 0 {
            return Err(err());
        }
        u64::try_from(scaled / divisor).map(SimTime).map_err(|_| err())
    }
}

impl Serialize for SimTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SimTime {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(de::Error::custom)
    }
}

/// Parses an unsigned decimal literal into `(mantissa, fractional digits)`,
/// so that the value is `mantissa / 10^digits`.
pub(crate) fn parse_decimal(text: &str) -> Option<(u128, u32)> {
    if text.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa = digits.parse::<u128>().ok()?;
    Some((mantissa, frac_part.len() as u32))
}
