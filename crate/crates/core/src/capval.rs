//! Extended value sets for Novikov-Shubin invariants and capacities.
//!
//! A Novikov-Shubin invariant lives in `[0, ∞] ⨿ {∞⁺}`, where `∞⁺` marks a
//! spectral gap at zero. A capacity lives in `{0⁻} ⨿ [0, ∞]`, where `0⁻` is a
//! formal bottom element strictly below `0`. The two sets are linked by the
//! order-reversing inversion [`ns_to_capacity`].
//!
//! Both types print and parse as `"0-"`, `"inf"`, `"inf+"` or a decimal numeral.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A Novikov-Shubin invariant.
///
/// Ordered as `Finite(a) < Finite(b)` iff `a < b`, and
/// `Finite(_) < Infinity < InfinityPlus`.
#[derive(Debug, Clone, Copy)]
pub enum NSValue {
    Finite(f64),
    Infinity,
    /// Spectral gap at zero; the module is trivial.
    InfinityPlus,
}

/// A capacity.
///
/// Ordered as `ZeroMinus < Finite(r) < Infinity` for every finite `r >= 0`.
/// `ZeroMinus` and `Finite(0.0)` are different values and are never merged.
#[derive(Debug, Clone, Copy)]
pub enum CapacityValue {
    ZeroMinus,
    Finite(f64),
    Infinity,
}

fn check_finite_part(value: f64) -> Result<f64> {
    if value.is_nan() || value < 0.0 || value.is_infinite() {
        return Err(Error::InvalidArgument(format!(
            "finite part must be a nonnegative real, got {value}"
        )));
    }
    // normalise -0.0 so that printing and hashing are stable
    Ok(value + 0.0)
}

impl NSValue {
    pub fn finite(value: f64) -> Result<Self> {
        check_finite_part(value).map(NSValue::Finite)
    }

    pub fn finite_part(&self) -> Option<f64> {
        match *self {
            NSValue::Finite(a) => Some(a),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            NSValue::Finite(_) => 0,
            NSValue::Infinity => 1,
            NSValue::InfinityPlus => 2,
        }
    }
}

impl CapacityValue {
    pub fn finite(value: f64) -> Result<Self> {
        check_finite_part(value).map(CapacityValue::Finite)
    }

    pub fn finite_part(&self) -> Option<f64> {
        match *self {
            CapacityValue::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_zero_minus(&self) -> bool {
        matches!(self, CapacityValue::ZeroMinus)
    }

    fn rank(&self) -> u8 {
        match self {
            CapacityValue::ZeroMinus => 0,
            CapacityValue::Finite(_) => 1,
            CapacityValue::Infinity => 2,
        }
    }
}

/// Inverts a Novikov-Shubin invariant into a capacity.
///
/// `a ↦ 1/a` on `(0, ∞)`, with `0 ↦ ∞`, `∞ ↦ 0` and `∞⁺ ↦ 0⁻`.
pub fn ns_to_capacity(a: NSValue) -> CapacityValue {
    match a {
        NSValue::Finite(0.0) => CapacityValue::Infinity,
        NSValue::Finite(x) => CapacityValue::Finite(1.0 / x),
        NSValue::Infinity => CapacityValue::Finite(0.0),
        NSValue::InfinityPlus => CapacityValue::ZeroMinus,
    }
}

/// Inverse of [`ns_to_capacity`].
pub fn capacity_to_ns(c: CapacityValue) -> NSValue {
    match c {
        CapacityValue::ZeroMinus => NSValue::InfinityPlus,
        CapacityValue::Finite(0.0) => NSValue::Infinity,
        CapacityValue::Finite(x) => NSValue::Finite(1.0 / x),
        CapacityValue::Infinity => NSValue::Finite(0.0),
    }
}

/// Capacity addition: `0⁻` is neutral, `∞` absorbs, finite parts add.
pub fn cap_add(r: CapacityValue, s: CapacityValue) -> CapacityValue {
    use CapacityValue::*;
    match (r, s) {
        (Infinity, _) | (_, Infinity) => Infinity,
        (ZeroMinus, x) | (x, ZeroMinus) => x,
        (Finite(a), Finite(b)) => Finite(a + b),
    }
}

pub fn cap_cmp(r: CapacityValue, s: CapacityValue) -> Ordering {
    r.cmp(&s)
}

/// Maximum of a nonempty family under the capacity order.
pub fn cap_sup(values: &[CapacityValue]) -> Result<CapacityValue> {
    values.iter().copied().max().ok_or(Error::EmptySupremum)
}

impl PartialEq for NSValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for NSValue {}

impl PartialOrd for NSValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NSValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NSValue::Finite(a), NSValue::Finite(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialEq for CapacityValue {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for CapacityValue {}

impl PartialOrd for CapacityValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CapacityValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (CapacityValue::Finite(a), CapacityValue::Finite(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for NSValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NSValue::Finite(a) => write!(f, "{a}"),
            NSValue::Infinity => f.write_str("inf"),
            NSValue::InfinityPlus => f.write_str("inf+"),
        }
    }
}

impl fmt::Display for CapacityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityValue::ZeroMinus => f.write_str("0-"),
            CapacityValue::Finite(r) => write!(f, "{r}"),
            CapacityValue::Infinity => f.write_str("inf"),
        }
    }
}

fn parse_decimal(s: &str, what: &'static str) -> Result<f64> {
    let err = || Error::Parse {
        what,
        input: s.to_string(),
    };
    // f64::from_str accepts "inf"/"nan" spellings; only plain numerals are allowed here
    if !s
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
    {
        return Err(err());
    }
    let value: f64 = s.parse().map_err(|_| err())?;
    check_finite_part(value).map_err(|_| err())
}

impl FromStr for NSValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(NSValue::Infinity),
            "inf+" => Ok(NSValue::InfinityPlus),
            t => parse_decimal(t, "Novikov-Shubin value").map(NSValue::Finite),
        }
    }
}

impl FromStr for CapacityValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0-" => Ok(CapacityValue::ZeroMinus),
            "inf" => Ok(CapacityValue::Infinity),
            t => parse_decimal(t, "capacity value").map(CapacityValue::Finite),
        }
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(NSValue);
string_serde!(CapacityValue);
