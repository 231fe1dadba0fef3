//! The four step operations, each a pure function on the working operand.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::digits::{DigitString, KeyValue};
use crate::error::Error;

/// Divides `value` by the key: `value - quotient * key = remainder`.
///
/// The state machine calls this with `value > key`, except directly after a
/// replicate where the mutate is unconditional and the quotient may be 0.
pub fn mutate_step(value: &BigUint, key: &KeyValue) -> Result<(BigUint, DigitString), Error> {
    if value.is_zero() {
        return Err(Error::InvalidMutate);
    }
    let (quotient, remainder) = value.div_rem(key.value());
    Ok((quotient, DigitString::from_value(&remainder)))
}

/// Writes the digit string twice (`"01"` becomes `"0101"`).
pub fn replicate_step(s: &DigitString) -> Result<DigitString, Error> {
    if s.is_zero_literal() {
        return Err(Error::InvalidReplicate);
    }
    Ok(s.concat_self())
}

/// Squares the numeric value; the result is canonical.
pub fn multiply_step(s: &DigitString) -> Result<DigitString, Error> {
    let v = s.value();
    if v.is_zero() {
        return Err(Error::InvalidMultiply);
    }
    Ok(DigitString::from_value(&(&v * &v)))
}

/// Rewrites the zero remainder `"0"` into the literal `"01"`.
pub fn augment_step(s: &DigitString) -> Result<DigitString, Error> {
    if !s.is_zero_literal() {
        return Err(Error::InvalidAugment);
    }
    Ok(augmented())
}

pub(crate) fn augmented() -> DigitString {
    DigitString::new("01").expect("literal digits")
}

/// Integer square root when `v` is a perfect square.
pub(crate) fn exact_sqrt(v: &BigUint) -> Option<BigUint> {
    let root = v.sqrt();
    if &root * &root == *v {
        Some(root)
    } else {
        None
    }
}
