//! Exact fixed-point arithmetic for budget shares.
//!
//! Every allocation entry is a percentage of the total budget. Convex
//! combinations with weights such as 0.25 or 0.9 produce values like `38.5`
//! or `12.25`, so amounts are stored as integer hundredths of a percentage
//! point. Sums are exact and the "sums to 100" invariant is an integer
//! equality.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A budget amount in hundredths of a percentage point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Amount(i64);

impl Amount {
    /// Hundredths per percentage point.
    pub const SCALE: i64 = 100;
    pub const ZERO: Amount = Amount(0);
    /// The whole budget, 100 percent.
    pub const TOTAL: Amount = Amount(100 * Self::SCALE);

    pub const fn from_points(points: i64) -> Self {
        Amount(points * Self::SCALE)
    }

    pub const fn from_hundredths(hundredths: i64) -> Self {
        Amount(hundredths)
    }

    pub const fn hundredths(self) -> i64 {
        self.0
    }

    pub fn is_whole(self) -> bool {
        self.0 % Self::SCALE == 0
    }

    /// The amount in whole points, if it has no fractional part.
    pub fn whole_points(self) -> Option<i64> {
        self.is_whole().then_some(self.0 / Self::SCALE)
    }

    /// True when the amount is an integer multiple of `points` whole points.
    pub fn is_multiple_of(self, points: i64) -> bool {
        self.0 % (points * Self::SCALE) == 0
    }

    pub fn abs(self) -> Self {
        Amount(self.0.abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }

    /// Exact value in points as a rational number.
    pub fn to_ratio(self) -> Ratio<i128> {
        Ratio::new(self.0 as i128, Self::SCALE as i128)
    }

    /// Converts a float that is a multiple of 0.01 (up to representation
    /// error). Returns `None` for non-finite or finer-grained values.
    pub fn from_f64(value: f64) -> Option<Self> {
        if !value.is_finite() {
            return None;
        }
        let scaled = value * Self::SCALE as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 || rounded.abs() > 1e15 {
            return None;
        }
        Some(Amount(rounded as i64))
    }

    /// Scales by a weight given in hundredths, returning `None` when the
    /// product is not representable in hundredths.
    pub fn scale_by(self, weight: Weight) -> Option<Self> {
        let product = self.0 * weight.hundredths() as i64;
        (product % 100 == 0).then_some(Amount(product / 100))
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / Self::SCALE as u64;
        let frac = abs % Self::SCALE as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else if frac.is_multiple_of(10) {
            write!(f, "{sign}{whole}.{}", frac / 10)
        } else {
            write!(f, "{sign}{whole}.{frac:02}")
        }
    }
}

/// Error returned when a decimal string is not an amount in hundredths.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a decimal amount with at most two fractional digits")]
pub struct ParseAmountError(String);

impl FromStr for Amount {
    type Err = ParseAmountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseAmountError(s.to_string());
        let t = s.trim();
        let (negative, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_trimmed.len() > 2 {
            return Err(err());
        }
        let whole: i64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let frac: i64 = match frac_trimmed.len() {
            0 => 0,
            1 => frac_trimmed.parse::<i64>().map_err(|_| err())? * 10,
            _ => frac_trimmed.parse().map_err(|_| err())?,
        };
        let value = whole
            .checked_mul(Self::SCALE)
            .and_then(|w| w.checked_add(frac))
            .ok_or_else(err)?;
        Ok(Amount(if negative { -value } else { value }))
    }
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.whole_points() {
            Some(points) => serializer.serialize_i64(points),
            None => serializer.serialize_f64(self.to_f64()),
        }
    }
}

impl<'de> Deserialize<'de> for Amount {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Amount::from_f64(value).ok_or_else(|| {
            serde::de::Error::custom(format!(
                "{value} is not an amount with at most two fractional digits"
            ))
        })
    }
}

impl Add for Amount {
    type Output = Amount;
    fn add(self, rhs: Amount) -> Amount {
        Amount(self.0 + rhs.0)
    }
}

impl AddAssign for Amount {
    fn add_assign(&mut self, rhs: Amount) {
        self.0 += rhs.0;
    }
}

impl Sub for Amount {
    type Output = Amount;
    fn sub(self, rhs: Amount) -> Amount {
        Amount(self.0 - rhs.0)
    }
}

impl SubAssign for Amount {
    fn sub_assign(&mut self, rhs: Amount) {
        self.0 -= rhs.0;
    }
}

impl Neg for Amount {
    type Output = Amount;
    fn neg(self) -> Amount {
        Amount(-self.0)
    }
}

impl Mul<i64> for Amount {
    type Output = Amount;
    fn mul(self, rhs: i64) -> Amount {
        Amount(self.0 * rhs)
    }
}

impl Sum for Amount {
    fn sum<I: Iterator<Item = Amount>>(iter: I) -> Amount {
        Amount(iter.map(|a| a.0).sum())
    }
}

impl<'a> Sum<&'a Amount> for Amount {
    fn sum<I: Iterator<Item = &'a Amount>>(iter: I) -> Amount {
        Amount(iter.map(|a| a.0).sum())
    }
}

/// A mixing weight in `[0, 1]`, stored in hundredths (λ = 0.25 is `25`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(u8);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    pub const ONE: Weight = Weight(100);

    pub fn from_hundredths(hundredths: u8) -> Option<Self> {
        (hundredths <= 100).then_some(Weight(hundredths))
    }

    pub fn hundredths(self) -> u8 {
        self.0
    }

    /// `1 - self`.
    pub fn complement(self) -> Weight {
        Weight(100 - self.0)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn from_f64(value: f64) -> Option<Self> {
        if !(0.0..=1.0).contains(&value) {
            return None;
        }
        let scaled = value * 100.0;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 {
            return None;
        }
        Some(Weight(rounded as u8))
    }

    /// True for weights strictly between 0 and 1.
    pub fn is_interior(self) -> bool {
        self.0 > 0 && self.0 < 100
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            100 => write!(f, "1"),
            0 => write!(f, "0"),
            h if h % 10 == 0 => write!(f, "0.{}", h / 10),
            h => write!(f, "0.{h:02}"),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Weight::from_f64(value).ok_or_else(|| {
            serde::de::Error::custom(format!("{value} is not a weight in hundredths within [0, 1]"))
        })
    }
}
