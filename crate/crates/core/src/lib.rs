//! Reversible integer encoding built from four operations: replicate,
//! augment, mutate and multiply.
//!
//! Encrypting an integer against a key produces a trace of the operations
//! applied (its "fingerprint") plus a final remainder, written as text like
//! `m11R2m4MR4m8 ~ 4`. Decrypting undoes each operation in reverse order.
//!
//! This is a reversible encoding, **not** secure encryption. The first token
//! of every ciphertext discloses `floor(data / key)`, and identical inputs
//! always give identical outputs.
//!
//! ```
//! use num_bigint::BigUint;
//! use ramm::{decrypt, encrypt, KeyValue};
//!
//! let key = KeyValue::try_from(5).unwrap();
//! let c = encrypt(&BigUint::from(57u8), &key).unwrap();
//! assert_eq!(c.to_string(), "m11R2m4MR4m8 ~ 4");
//! assert_eq!(decrypt(&c, &key).unwrap(), BigUint::from(57u8));
//! ```

pub mod analysis;
pub mod codec;
mod decrypt;
mod digits;
mod encrypt;
mod error;
pub mod image;
pub mod ops;
mod trace;

pub use codec::{parse, serialize, ParseError, ParseErrorKind, ParseMode};
pub use decrypt::decrypt;
pub use digits::{DigitString, KeyValue, NotDigits};
pub use encrypt::{
    check_termination, encrypt, encrypt_with_limit, select_next_op, EncryptState, GrowthCursor, MAX_OPS,
};
pub use error::{Error, StructureError};
pub use trace::{CipherText, OpKind, OpToken, Trace};
