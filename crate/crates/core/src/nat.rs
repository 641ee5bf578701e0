//! Arbitrary-precision naturals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact natural number.
///
/// Zero is representable so that boundary checks (`NotNatural`) can be
/// expressed, but every public Collatz operation rejects it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Nat(BigUint);

impl Nat {
    pub fn zero() -> Self {
        Nat(BigUint::zero())
    }

    pub fn one() -> Self {
        Nat(BigUint::one())
    }

    /// `2^exp`.
    pub fn pow2(exp: u64) -> Self {
        Nat(BigUint::one() << exp)
    }

    /// `3^exp`.
    pub fn pow3(exp: u32) -> Self {
        Nat(BigUint::from(3u8).pow(exp))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_even(&self) -> bool {
        self.0.is_even()
    }

    pub fn is_odd(&self) -> bool {
        self.0.is_odd()
    }

    /// Returns `Some(m)` when the value equals `2^m`.
    pub fn power_of_two_exponent(&self) -> Option<u64> {
        if self.0.is_zero() {
            return None;
        }
        let tz = self.0.trailing_zeros()?;
        (self.0.bits() == tz + 1).then_some(tz)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    /// Number of significant bits.
    pub fn bits(&self) -> u64 {
        self.0.bits()
    }
}

impl From<u64> for Nat {
    fn from(v: u64) -> Self {
        Nat(BigUint::from(v))
    }
}

impl From<u32> for Nat {
    fn from(v: u32) -> Self {
        Nat(BigUint::from(v))
    }
}

impl From<u128> for Nat {
    fn from(v: u128) -> Self {
        Nat(BigUint::from(v))
    }
}

impl From<BigUint> for Nat {
    fn from(v: BigUint) -> Self {
        Nat(v)
    }
}

impl FromStr for Nat {
    type Err = Error;

    /// Parses a plain decimal string (ASCII digits only).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(s.to_string()));
        }
        BigUint::parse_bytes(s.as_bytes(), 10)
            .map(Nat)
            .ok_or_else(|| Error::Parse(s.to_string()))
    }
}

impl fmt::Display for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for Nat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

// Decimal strings on the wire: values outgrow 64 bits almost immediately.
impl Serialize for Nat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Nat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
