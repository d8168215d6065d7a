use alloc::string::String;
use core::fmt;
use core::ops::{Add, AddAssign, Neg, Sub, SubAssign};

/// Fixed-point currency amount in millionths of a unit.
///
/// With the `serde` feature it serializes as an exact decimal string such as
/// `"12.500000"` and deserializes from such a string or from a plain number
/// of units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(pub i64);

impl Money {
    pub const SCALE: i64 = 1_000_000;
    pub const ZERO: Money = Money(0);

    pub const fn from_micros(micros: i64) -> Self {
        Money(micros)
    }

    pub const fn micros(self) -> i64 {
        self.0
    }

    pub const fn from_units(units: i64) -> Self {
        Money(units * Self::SCALE)
    }

    /// Rounds to the nearest micro-unit.
    pub fn from_f64(value: f64) -> Self {
        Money(libm::round(value * Self::SCALE as f64) as i64)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / Self::SCALE as f64
    }

    /// `quantity` shares at this per-share price.
    pub fn times(self, quantity: u64) -> Money {
        Money(self.0 * quantity as i64)
    }

    /// `self * num / den`, rounded half away from zero.
    pub fn mul_div(self, num: i64, den: i64) -> Money {
        let n = self.0 as i128 * num as i128;
        let d = den as i128;
        let q = n / d;
        let r = n % d;
        let q = if 2 * r.abs() >= d.abs() { q + n.signum() * d.signum() } else { q };
        Money(q as i64)
    }

    /// Whole shares this amount buys at `price` (floor). Zero when either is non-positive.
    pub fn shares_at(self, price: Money) -> u64 {
        if self.0 <= 0 || price.0 <= 0 {
            0
        } else {
            (self.0 / price.0) as u64
        }
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:06}", abs / Self::SCALE as u64, abs % Self::SCALE as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseMoneyError(pub String);

impl fmt::Display for ParseMoneyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid amount `{}`", self.0)
    }
}

impl core::str::FromStr for Money {
    type Err = ParseMoneyError;

    /// Exact decimal parse; digits past the sixth decimal place round half away from zero.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseMoneyError(String::from(s));
        let t = s.trim();
        let (negative, t) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if (int.is_empty() && frac.is_empty()) || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let whole: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| err())? };
        let mut micros: i64 = 0;
        for (i, b) in frac.bytes().take(6).enumerate() {
            micros += i64::from(b - b'0') * 10i64.pow(5 - i as u32);
        }
        if frac.as_bytes().get(6).is_some_and(|b| *b >= b'5') {
            micros += 1;
        }
        let total = whole.checked_mul(Self::SCALE).and_then(|w| w.checked_add(micros)).ok_or_else(err)?;
        Ok(Money(if negative { -total } else { total }))
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl core::iter::Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

#[cfg(feature = "serde")]
mod serde_impl {
    use super::Money;
    use alloc::string::ToString;
    use core::fmt;
    use serde::de::{self, Visitor};

    impl serde::Serialize for Money {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&self.to_string())
        }
    }

    struct MoneyVisitor;

    impl Visitor<'_> for MoneyVisitor {
        type Value = Money;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a decimal amount as a string or number")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Money, E> {
            v.parse().map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Money, E> {
            v.checked_mul(Money::SCALE).map(Money).ok_or_else(|| E::custom("amount out of range"))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Money, E> {
            i64::try_from(v).map_err(E::custom).and_then(|v| self.visit_i64(v))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Money, E> {
            if !v.is_finite() {
                return Err(E::custom("amount must be finite"));
            }
            // shortest round-trip text of the float, then exact decimal parse
            self.visit_str(&alloc::format!("{v}"))
        }
    }

    impl<'de> serde::Deserialize<'de> for Money {
        fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Money, D::Error> {
            d.deserialize_any(MoneyVisitor)
        }
    }
}

macro_rules! string_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
        #[cfg_attr(feature = "serde", serde(transparent))]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                $name(s.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(String::from(s))
            }
        }

        impl core::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_newtype!(
    /// Ticker symbol.
    Symbol
);
string_newtype!(
    /// Session participant id.
    ParticipantId
);
