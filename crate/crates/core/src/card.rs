//! Symbolic cardinalities for anonymous node classes.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseCardError;

/// A cardinal restricted to the three values the constructions distinguish:
/// a finite count, the countable cardinal, and the ambient size of a poset.
///
/// The derived order is the cardinal order: `Finite(a) < Finite(b)` iff
/// `a < b`, and every finite value is below `Aleph0`, which is below `Beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CardTag {
    Finite(u64),
    Aleph0,
    Beta,
}

impl CardTag {
    pub const ZERO: CardTag = CardTag::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, CardTag::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self == CardTag::ZERO
    }

    /// Number of members an oracle materializes for a class of this size.
    pub fn truncated(self, cap: usize) -> usize {
        match self {
            CardTag::Finite(n) => (n as usize).min(cap),
            _ => cap,
        }
    }
}

impl Default for CardTag {
    fn default() -> Self {
        CardTag::ZERO
    }
}

impl Add for CardTag {
    type Output = CardTag;

    fn add(self, rhs: CardTag) -> CardTag {
        match (self, rhs) {
            (CardTag::Finite(a), CardTag::Finite(b)) => match a.checked_add(b) {
                Some(n) => CardTag::Finite(n),
                // Saturate instead of wrapping; no skeleton gets near this.
                None => CardTag::Finite(u64::MAX),
            },
            (a, b) => a.max(b),
        }
    }
}

impl Sum for CardTag {
    fn sum<I: Iterator<Item = CardTag>>(iter: I) -> CardTag {
        iter.fold(CardTag::ZERO, Add::add)
    }
}

impl From<u64> for CardTag {
    fn from(n: u64) -> Self {
        CardTag::Finite(n)
    }
}

impl fmt::Display for CardTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardTag::Finite(n) => write!(f, "finite:{n}"),
            CardTag::Aleph0 => f.write_str("aleph0"),
            CardTag::Beta => f.write_str("beta"),
        }
    }
}

impl FromStr for CardTag {
    type Err = ParseCardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aleph0" => Ok(CardTag::Aleph0),
            "beta" => Ok(CardTag::Beta),
            _ => {
                let digits = s.strip_prefix("finite:").ok_or_else(|| ParseCardError(s.to_owned()))?;
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(ParseCardError(s.to_owned()));
                }
                digits
                    .parse::<u64>()
                    .map(CardTag::Finite)
                    .map_err(|_| ParseCardError(s.to_owned()))
            }
        }
    }
}

impl Serialize for CardTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CardTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
