//! Supports of formal power series: subsets of `Z≥0` in finite or
//! finite-plus-tail form, with the valuation map `Val_S` and the shift
//! induced by differentiation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::semiring::TropValue;

/// A subset of `Z≥0`, stored as a finite set plus an optional full tail
/// `[tail_from, ∞)`.
///
/// Values are kept in canonical form: the finite part is sorted and
/// duplicate-free, every finite element lies strictly below `tail_from`,
/// and elements adjacent to the tail are absorbed into it (so
/// `{2,3} ∪ [4,∞)` is stored as `[2,∞)`). Structural equality therefore
/// coincides with set equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupportSet {
    finite: Vec<u64>,
    tail_from: Option<u64>,
}

impl SupportSet {
    /// The empty set (the support of the zero series).
    pub fn empty() -> Self {
        SupportSet { finite: Vec::new(), tail_from: None }
    }

    /// All of `Z≥0`.
    pub fn full() -> Self {
        SupportSet { finite: Vec::new(), tail_from: Some(0) }
    }

    /// Builds a set from arbitrary finite elements and an optional tail,
    /// normalizing to canonical form.
    pub fn new(finite: impl IntoIterator<Item = u64>, tail_from: Option<u64>) -> Self {
        let mut finite: Vec<u64> = finite.into_iter().collect();
        finite.sort_unstable();
        finite.dedup();
        let mut tail_from = tail_from;
        if let Some(m) = tail_from.as_mut() {
            finite.retain(|&x| x < *m);
            while *m > 0 && finite.last() == Some(&(*m - 1)) {
                finite.pop();
                *m -= 1;
            }
        }
        SupportSet { finite, tail_from }
    }

    /// A finite set.
    pub fn from_elements(finite: impl IntoIterator<Item = u64>) -> Self {
        Self::new(finite, None)
    }

    /// Finite elements plus the tail `[m, ∞)`.
    pub fn with_tail(finite: impl IntoIterator<Item = u64>, m: u64) -> Self {
        Self::new(finite, Some(m))
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.tail_from.is_none()
    }

    /// True when the set has no tail.
    pub fn is_finite(&self) -> bool {
        self.tail_from.is_none()
    }

    pub fn finite_part(&self) -> &[u64] {
        &self.finite
    }

    pub fn tail_from(&self) -> Option<u64> {
        self.tail_from
    }

    pub fn contains(&self, i: u64) -> bool {
        if let Some(m) = self.tail_from {
            if i >= m {
                return true;
            }
        }
        self.finite.binary_search(&i).is_ok()
    }

    /// The least element, `None` for the empty set.
    pub fn min_element(&self) -> Option<u64> {
        match (self.finite.first(), self.tail_from) {
            (Some(&f), _) => Some(f),
            (None, m) => m,
        }
    }

    /// The valuation map `Val_S(j) = min{α ∈ S : α ≥ j} − j`, or infinity
    /// when `S` has no element ≥ j.
    pub fn val_at(&self, j: u64) -> TropValue {
        let idx = self.finite.partition_point(|&x| x < j);
        if let Some(&s) = self.finite.get(idx) {
            // Canonical form keeps finite elements below the tail, so this
            // is the least candidate overall.
            return TropValue::Finite(s - j);
        }
        match self.tail_from {
            Some(m) => TropValue::Finite(m.max(j) - j),
            None => TropValue::Infinity,
        }
    }

    /// The image `{i − j : i ∈ S, i ≥ j}`; a tail `[m, ∞)` maps to
    /// `[max(m − j, 0), ∞)`. This is the support of the `j`-th derivative
    /// of any series with support `self`.
    pub fn shift(&self, j: u64) -> SupportSet {
        let finite = self.finite.iter().filter(|&&i| i >= j).map(|&i| i - j);
        SupportSet::new(finite, self.tail_from.map(|m| m.saturating_sub(j)))
    }

    /// Set union, preserving tails.
    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let tail = match (self.tail_from, other.tail_from) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (t, None) | (None, t) => t,
        };
        SupportSet::new(
            self.finite.iter().chain(other.finite.iter()).copied(),
            tail,
        )
    }

    /// The intersection `S ∩ {0, …, n}` as a finite set (tail clipped).
    pub fn restrict(&self, n: u64) -> SupportSet {
        let mut finite: Vec<u64> = self.finite.iter().copied().take_while(|&x| x <= n).collect();
        if let Some(m) = self.tail_from {
            if m <= n {
                finite.extend(m..=n);
            }
        }
        SupportSet::new(finite, None)
    }

    /// Elements of `S ∩ {0, …, n}` in ascending order.
    pub fn iter_up_to(&self, n: u64) -> impl Iterator<Item = u64> + '_ {
        let tail = match self.tail_from {
            Some(m) if m <= n => Some(m..=n),
            _ => None,
        };
        self.finite
            .iter()
            .copied()
            .take_while(move |&x| x <= n)
            .chain(tail.into_iter().flatten())
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, x) in self.finite.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        if let Some(m) = self.tail_from {
            if !self.finite.is_empty() {
                write!(f, ",")?;
            }
            write!(f, "...{m}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for SupportSet {
    type Err = crate::parse::ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        crate::parse::parse_support_set(s)
    }
}

impl Serialize for SupportSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            finite: &'a [u64],
            #[serde(skip_serializing_if = "Option::is_none")]
            tail_from: Option<u64>,
        }
        Repr { finite: &self.finite, tail_from: self.tail_from }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SupportSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(default)]
            finite: Vec<u64>,
            #[serde(default)]
            tail_from: Option<u64>,
        }
        let repr = Repr::deserialize(deserializer)?;
        Ok(SupportSet::new(repr.finite, repr.tail_from))
    }
}
