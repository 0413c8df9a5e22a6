//! The idempotent min-plus semiring `(Z≥0 ∪ {inf}, ⊕, ⊙)`.
//!
//! Tropical addition `⊕` is minimum, tropical multiplication `⊙` is ordinary
//! addition. `inf` is the neutral element for `⊕` and absorbing for `⊙`;
//! `0` is the neutral element for `⊙`.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An element of the tropical semiring: a nonnegative integer or infinity.
///
/// The derived order puts finite values first (by magnitude) and `Infinity`
/// last, so `Ord::min` agrees with tropical addition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TropValue {
    Finite(u64),
    Infinity,
}

impl TropValue {
    /// Neutral element of `⊕`.
    pub const ZERO: TropValue = TropValue::Infinity;
    /// Neutral element of `⊙`.
    pub const ONE: TropValue = TropValue::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, TropValue::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, TropValue::Infinity)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<u64> {
        match self {
            TropValue::Finite(v) => Some(v),
            TropValue::Infinity => None,
        }
    }

    /// Tropical addition: `a ⊕ b = min(a, b)`.
    pub fn add(self, rhs: TropValue) -> TropValue {
        self.min(rhs)
    }

    /// Tropical multiplication: `a ⊙ b = a + b`, with infinity absorbing.
    pub fn mul(self, rhs: TropValue) -> TropValue {
        match (self, rhs) {
            (TropValue::Finite(a), TropValue::Finite(b)) => TropValue::Finite(a + b),
            _ => TropValue::Infinity,
        }
    }

    /// `n`-fold tropical product of `self`, i.e. `n * self`. The empty
    /// product (`n = 0`) is `0`, the neutral element of `⊙`, even when
    /// `self` is infinite.
    pub fn mul_scalar(self, n: u64) -> TropValue {
        if n == 0 {
            return TropValue::ONE;
        }
        match self {
            TropValue::Finite(v) => TropValue::Finite(v * n),
            TropValue::Infinity => TropValue::Infinity,
        }
    }
}

impl From<u64> for TropValue {
    fn from(v: u64) -> Self {
        TropValue::Finite(v)
    }
}

impl fmt::Display for TropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropValue::Finite(v) => write!(f, "{v}"),
            TropValue::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for TropValue {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(TropValue::Infinity);
        }
        s.parse::<u64>()
            .map(TropValue::Finite)
            .map_err(|_| format!("expected a nonnegative integer or `inf`, got `{s}`"))
    }
}

impl Serialize for TropValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TropValue::Finite(v) => serializer.serialize_u64(*v),
            TropValue::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for TropValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(TropValue::Finite(v)),
            Repr::Str(s) => s.parse().map_err(D::Error::custom),
        }
    }
}
