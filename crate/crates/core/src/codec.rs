//! Text and binary forms of a ciphertext.
//!
//! Canonical text is the token run followed by `" ~ "` and the remainder:
//!
//! ```text
//! cipher    := token+ " ~ " remainder
//! token     := "m" digits | "R" digits | "M" | "A"
//! remainder := "0" | [1-9][0-9]*
//! ```
//!
//! Strict parsing accepts exactly that grammar (and canonical mutate
//! quotients). Lenient parsing also accepts lowercase `r`/`a`, a bare `m`
//! (no digits) as multiply, whitespace around `~` and at either end, and
//! leading zeros in numbers, normalizing all of them.
//!
//! The binary record is a big-endian `u16` byte length followed by the
//! canonical text.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::digits::DigitString;
use crate::error::StructureError;
use crate::trace::{CipherText, OpToken, Trace};

pub const SEPARATOR: &str = " ~ ";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownCharacter(u8),
    /// `m` or `R` with no digits, or nothing after the separator.
    MissingOperand,
    MissingRemainderSeparator,
    /// A number with leading zeros where the strict grammar forbids them.
    NonCanonicalNumber,
    StructureViolation(StructureError),
}

/// Parse failure with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnknownCharacter(b) if b.is_ascii_graphic() || *b == b' ' => {
                write!(f, "unknown character '{}'", *b as char)
            }
            ParseErrorKind::UnknownCharacter(b) => write!(f, "unknown byte 0x{b:02x}"),
            ParseErrorKind::MissingOperand => f.write_str("missing operand digits"),
            ParseErrorKind::MissingRemainderSeparator => f.write_str("missing \" ~ \" remainder separator"),
            ParseErrorKind::NonCanonicalNumber => f.write_str("number has leading zeros"),
            ParseErrorKind::StructureViolation(e) => write!(f, "structure violation: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("text form is {len} bytes, records hold at most 65535")]
    LengthOverflow { len: usize },
    #[error("truncated record at offset {offset}: need {needed} bytes, {available} available")]
    TruncatedRecord {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("{count} trailing bytes after record at offset {offset}")]
    TrailingBytes { offset: usize, count: usize },
}

/// Canonical text form.
pub fn serialize(cipher: &CipherText) -> String {
    cipher.to_string()
}

pub fn parse(text: &str, mode: ParseMode) -> Result<CipherText, ParseError> {
    parse_bytes(text.as_bytes(), mode)
}

pub fn parse_strict(text: &str) -> Result<CipherText, ParseError> {
    parse(text, ParseMode::Strict)
}

/// Parses raw bytes; anything outside the grammar (including non-ASCII) is
/// reported as an unknown character at its offset.
pub fn parse_bytes(input: &[u8], mode: ParseMode) -> Result<CipherText, ParseError> {
    Parser { input, pos: 0, mode }.cipher()
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    mode: ParseMode,
}

impl<'a> Parser<'a> {
    fn lenient(&self) -> bool {
        self.mode == ParseMode::Lenient
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn err<T>(&self, offset: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { offset, kind })
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> &'a [u8] {
        let start = self.pos;
        while matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            self.pos += 1;
        }
        let input = self.input;
        &input[start..self.pos]
    }

    fn cipher(mut self) -> Result<CipherText, ParseError> {
        if self.lenient() {
            self.skip_ws();
        }
        let mut tokens = Vec::new();
        let mut offsets = Vec::new();
        let region_end = loop {
            let start = self.pos;
            let Some(b) = self.peek() else {
                return self.err(start, ParseErrorKind::MissingRemainderSeparator);
            };
            let token = match b {
                b'm' => {
                    self.pos += 1;
                    let digits = self.digits();
                    if digits.is_empty() {
                        if self.lenient() {
                            OpToken::Multiply
                        } else {
                            return self.err(start, ParseErrorKind::MissingOperand);
                        }
                    } else if digits.len() > 1 && digits[0] == b'0' && !self.lenient() {
                        return self.err(start + 1, ParseErrorKind::NonCanonicalNumber);
                    } else {
                        OpToken::Mutate(decimal(digits))
                    }
                }
                b'R' | b'r' if b == b'R' || self.lenient() => {
                    self.pos += 1;
                    let digits = self.digits();
                    if digits.is_empty() {
                        return self.err(start, ParseErrorKind::MissingOperand);
                    }
                    let half = std::str::from_utf8(digits).expect("ascii digits");
                    OpToken::Replicate(DigitString::new(half).expect("ascii digits"))
                }
                b'M' => {
                    self.pos += 1;
                    OpToken::Multiply
                }
                b'A' | b'a' if b == b'A' || self.lenient() => {
                    self.pos += 1;
                    OpToken::Augment
                }
                b' ' => break start,
                b'~' | b'\t' | b'\n' | b'\r' if self.lenient() => break start,
                other => return self.err(start, ParseErrorKind::UnknownCharacter(other)),
            };
            tokens.push(token);
            offsets.push(start);
        };

        if self.lenient() {
            self.skip_ws();
            if self.peek() != Some(b'~') {
                return self.err(self.pos, ParseErrorKind::MissingRemainderSeparator);
            }
            self.pos += 1;
            self.skip_ws();
        } else {
            if !self.input[self.pos..].starts_with(SEPARATOR.as_bytes()) {
                return self.err(self.pos, ParseErrorKind::MissingRemainderSeparator);
            }
            self.pos += SEPARATOR.len();
        }

        let rem_start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return match self.peek() {
                Some(b) => self.err(rem_start, ParseErrorKind::UnknownCharacter(b)),
                None => self.err(rem_start, ParseErrorKind::MissingOperand),
            };
        }
        if digits.len() > 1 && digits[0] == b'0' && !self.lenient() {
            return self.err(rem_start, ParseErrorKind::NonCanonicalNumber);
        }
        let remainder = DigitString::from_value(&decimal(digits));
        if self.lenient() {
            self.skip_ws();
        }
        if let Some(b) = self.peek() {
            return self.err(self.pos, ParseErrorKind::UnknownCharacter(b));
        }

        CipherText::new(Trace::new(tokens), remainder).map_err(|e| {
            let offset = match e {
                StructureError::Empty | StructureError::BadHead => offsets.first().copied().unwrap_or(0),
                _ => e.token_index().map(|i| offsets[i]).unwrap_or(region_end),
            };
            ParseError {
                offset,
                kind: ParseErrorKind::StructureViolation(e),
            }
        })
    }
}

fn decimal(digits: &[u8]) -> BigUint {
    BigUint::parse_bytes(digits, 10).expect("non-empty ascii digits")
}

/// Length-prefixed record: `u16` big-endian byte count, then the canonical text.
pub fn serialize_binary(cipher: &CipherText) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::new();
    write_record(cipher, &mut out)?;
    Ok(out)
}

/// Appends one record to `out`.
pub fn write_record(cipher: &CipherText, out: &mut Vec<u8>) -> Result<(), CodecError> {
    let text = serialize(cipher);
    let len = u16::try_from(text.len()).map_err(|_| CodecError::LengthOverflow { len: text.len() })?;
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(text.as_bytes());
    Ok(())
}

/// Parses exactly one record occupying all of `bytes`.
pub fn parse_binary(bytes: &[u8]) -> Result<CipherText, CodecError> {
    let (cipher, used) = read_record(bytes, 0)?;
    if used != bytes.len() {
        return Err(CodecError::TrailingBytes {
            offset: used,
            count: bytes.len() - used,
        });
    }
    Ok(cipher)
}

/// Reads one record starting at `offset`, returning it and the offset just
/// past it. Parse error offsets are absolute within `bytes`.
pub fn read_record(bytes: &[u8], offset: usize) -> Result<(CipherText, usize), CodecError> {
    let rest = bytes.get(offset..).unwrap_or(&[]);
    if rest.len() < 2 {
        return Err(CodecError::TruncatedRecord {
            offset,
            needed: 2,
            available: rest.len(),
        });
    }
    let len = u16::from_be_bytes([rest[0], rest[1]]) as usize;
    let body = &rest[2..];
    if body.len() < len {
        return Err(CodecError::TruncatedRecord {
            offset,
            needed: len + 2,
            available: rest.len(),
        });
    }
    let cipher = parse_bytes(&body[..len], ParseMode::Strict).map_err(|mut e| {
        e.offset += offset + 2;
        e
    })?;
    Ok((cipher, offset + 2 + len))
}
