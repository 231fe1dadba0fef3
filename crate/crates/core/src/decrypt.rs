//! Inverse walk: undo each token right to left, starting from the final
//! remainder.

use num_bigint::BigUint;

use crate::digits::{DigitString, KeyValue};
use crate::error::Error;
use crate::ops::{augmented, exact_sqrt};
use crate::trace::{CipherText, OpToken};

/// Recovers the data a ciphertext was produced from.
///
/// Every inverse step checks that the value in hand is one the forward step
/// could have produced, so a wrong key or corrupted trace surfaces as an
/// error naming the offending token rather than as a wrong number.
pub fn decrypt(cipher: &CipherText, key: &KeyValue) -> Result<BigUint, Error> {
    let tokens = cipher.trace().tokens();
    let mut s = cipher.remainder().clone();
    for (index, token) in tokens.iter().enumerate().rev() {
        s = match token {
            OpToken::Mutate(quotient) => {
                // The forward mutate always leaves a remainder below the key.
                let r = s.value();
                if r >= *key.value() {
                    return Err(Error::RemainderNotReduced { index });
                }
                DigitString::from_value(&(key.value() * quotient + r))
            }
            OpToken::Replicate(half) => {
                if s.value() != half.doubled_value() {
                    return Err(Error::ReplicateMismatch { index });
                }
                half.clone()
            }
            OpToken::Multiply => match exact_sqrt(&s.value()) {
                Some(root) => DigitString::from_value(&root),
                None => return Err(Error::MultiplyMismatch { index }),
            },
            OpToken::Augment => {
                if s != augmented() {
                    return Err(Error::AugmentMismatch { index });
                }
                DigitString::from_value(&BigUint::default())
            }
        };
    }
    Ok(s.value())
}
