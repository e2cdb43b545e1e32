//! Extended nonnegative rational distances.
//!
//! Every metric in this crate takes values in `Dist`: either a finite
//! nonnegative rational kept in lowest terms, or `∞`. Arithmetic is exact;
//! addition saturates at `∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An extended nonnegative rational number.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Dist {
    Finite { num: u64, den: u64 },
    Inf,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistParseError {
    #[error("rational p/q expected, found `{0}`")]
    NotRational(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Dist {
    pub const ZERO: Dist = Dist::Finite { num: 0, den: 1 };
    pub const ONE: Dist = Dist::Finite { num: 1, den: 1 };
    pub const INF: Dist = Dist::Inf;

    /// Builds `num/den` in lowest terms. Panics on a zero denominator.
    pub fn ratio(num: u64, den: u64) -> Dist {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        Dist::Finite {
            num: num / g,
            den: den / g,
        }
    }

    pub fn int(n: u64) -> Dist {
        Dist::Finite { num: n, den: 1 }
    }

    fn from_wide(num: u128, den: u128) -> Dist {
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        match (u64::try_from(num), u64::try_from(den)) {
            (Ok(num), Ok(den)) => Dist::Finite { num, den },
            _ => panic!("distance arithmetic overflow: {num}/{den}"),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite { .. })
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Dist::Finite { num: 0, .. })
    }

    pub fn parts(self) -> Option<(u64, u64)> {
        match self {
            Dist::Finite { num, den } => Some((num, den)),
            Dist::Inf => None,
        }
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Dist {
        Dist::ratio(1, 1u64 << k)
    }

    /// Multiplies by a natural number, saturating at `∞` only when `self` is `∞`.
    pub fn times(self, k: u64) -> Dist {
        match self {
            Dist::Inf => Dist::Inf,
            Dist::Finite { num, den } => Dist::from_wide(num as u128 * k as u128, den as u128),
        }
    }

    /// Lossy conversion, for display and plotting only.
    pub fn to_f64(self) -> f64 {
        match self {
            Dist::Inf => f64::INFINITY,
            Dist::Finite { num, den } => num as f64 / den as f64,
        }
    }
}

impl Default for Dist {
    fn default() -> Self {
        Dist::ZERO
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        match (*self, *other) {
            (Dist::Inf, Dist::Inf) => Ordering::Equal,
            (Dist::Inf, _) => Ordering::Greater,
            (_, Dist::Inf) => Ordering::Less,
            (Dist::Finite { num: a, den: b }, Dist::Finite { num: c, den: d }) => {
                (a as u128 * d as u128).cmp(&(c as u128 * b as u128))
            }
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Dist {
    type Output = Dist;

    fn add(self, rhs: Dist) -> Dist {
        match (self, rhs) {
            (Dist::Finite { num: a, den: b }, Dist::Finite { num: c, den: d }) => {
                if b == d {
                    Dist::from_wide(a as u128 + c as u128, b as u128)
                } else {
                    Dist::from_wide(
                        a as u128 * d as u128 + c as u128 * b as u128,
                        b as u128 * d as u128,
                    )
                }
            }
            _ => Dist::Inf,
        }
    }
}

impl std::iter::Sum for Dist {
    fn sum<I: Iterator<Item = Dist>>(iter: I) -> Dist {
        iter.fold(Dist::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Dist::Inf => f.write_str("inf"),
            Dist::Finite { num, den: 1 } => write!(f, "{num}"),
            Dist::Finite { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl FromStr for Dist {
    type Err = DistParseError;

    fn from_str(s: &str) -> Result<Dist, DistParseError> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Dist::Inf);
        }
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        if !digits(n) || !digits(d) {
            return Err(DistParseError::NotRational(s.to_string()));
        }
        let num: u64 = n.parse().map_err(|_| DistParseError::NotRational(s.to_string()))?;
        let den: u64 = d.parse().map_err(|_| DistParseError::NotRational(s.to_string()))?;
        if den == 0 {
            return Err(DistParseError::ZeroDenominator(s.to_string()));
        }
        Ok(Dist::ratio(num, den))
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Dist, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
