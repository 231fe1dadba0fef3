//! Keys and decimal digit strings.
//!
//! Remainders are carried as digit strings rather than integers because
//! replicate works on the textual form and augment introduces a leading zero
//! that must survive until the following replicate records it.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;

/// The divisor every mutate uses. Always at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyValue(BigUint);

impl KeyValue {
    pub fn new(value: BigUint) -> Result<Self, Error> {
        if value < BigUint::from(2u8) {
            return Err(Error::KeyTooSmall);
        }
        Ok(KeyValue(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl TryFrom<u64> for KeyValue {
    type Error = Error;

    fn try_from(v: u64) -> Result<Self, Error> {
        KeyValue::new(BigUint::from(v))
    }
}

impl fmt::Display for KeyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Returned when text is not a non-empty run of ASCII decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NotDigits;

impl fmt::Display for NotDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected one or more decimal digits")
    }
}

impl std::error::Error for NotDigits {}

/// Non-empty sequence of decimal digits. Leading zeros are kept: `"01"` and
/// `"1"` are different strings with the same numeric value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitString(String);

impl DigitString {
    pub fn new(digits: impl Into<String>) -> Result<Self, NotDigits> {
        let digits = digits.into();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(NotDigits);
        }
        Ok(DigitString(digits))
    }

    /// Canonical form of `value`: no leading zeros, `"0"` for zero.
    pub fn from_value(value: &BigUint) -> Self {
        DigitString(value.to_str_radix(10))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    // Never empty, but clippy wants the pair.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> BigUint {
        BigUint::parse_bytes(self.0.as_bytes(), 10).unwrap_or_default()
    }

    pub fn is_canonical(&self) -> bool {
        self.0 == "0" || !self.0.starts_with('0')
    }

    /// True only for the exact string `"0"`; `"00"` is not a zero remainder.
    pub fn is_zero_literal(&self) -> bool {
        self.0 == "0"
    }

    pub fn canonical(&self) -> DigitString {
        if self.is_canonical() {
            return self.clone();
        }
        let trimmed = self.0.trim_start_matches('0');
        if trimmed.is_empty() {
            DigitString("0".to_owned())
        } else {
            DigitString(trimmed.to_owned())
        }
    }

    /// Numeric value of this string written twice, without building it.
    pub fn doubled_value(&self) -> BigUint {
        let v = self.value();
        if v.is_zero() {
            return v;
        }
        let shift = BigUint::from(10u8).pow(self.0.len() as u32);
        &v * shift + &v
    }

    pub(crate) fn concat_self(&self) -> DigitString {
        let mut s = String::with_capacity(self.0.len() * 2);
        s.push_str(&self.0);
        s.push_str(&self.0);
        DigitString(s)
    }
}

impl FromStr for DigitString {
    type Err = NotDigits;

    fn from_str(s: &str) -> Result<Self, NotDigits> {
        DigitString::new(s)
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_bounds() {
        assert_eq!(KeyValue::try_from(0), Err(Error::KeyTooSmall));
        assert_eq!(KeyValue::try_from(1), Err(Error::KeyTooSmall));
        assert!(KeyValue::try_from(2).is_ok());
    }

    #[test]
    fn leading_zeros_are_significant() {
        let a = DigitString::new("01").unwrap();
        let b = DigitString::new("1").unwrap();
        assert_ne!(a, b);
        assert_eq!(a.value(), b.value());
        assert!(!a.is_canonical());
        assert_eq!(a.canonical(), b);
        assert_eq!(DigitString::new("000").unwrap().canonical().as_str(), "0");
    }

    #[test]
    fn rejects_non_digits() {
        assert!(DigitString::new("").is_err());
        assert!(DigitString::new("1a").is_err());
        assert!(DigitString::new("-1").is_err());
        assert!(DigitString::new("１").is_err());
    }

    #[test]
    fn doubled_value_matches_concatenation() {
        for s in ["1", "01", "2", "0101", "987", "0"] {
            let d = DigitString::new(s).unwrap();
            assert_eq!(d.doubled_value(), d.concat_self().value(), "{s}");
        }
    }
}
