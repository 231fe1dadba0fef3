use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::digits::DigitString;
use crate::error::StructureError;

/// One recorded operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OpToken {
    /// Division by the key; records the quotient, the remainder is carried on.
    Mutate(BigUint),
    /// String self-concatenation; records the half that was doubled.
    Replicate(DigitString),
    /// Squaring of the current value.
    Multiply,
    /// Rewrites a zero remainder into `"01"`.
    Augment,
}

impl OpToken {
    pub fn kind(&self) -> OpKind {
        match self {
            OpToken::Mutate(_) => OpKind::Mutate,
            OpToken::Replicate(_) => OpKind::Replicate,
            OpToken::Multiply => OpKind::Multiply,
            OpToken::Augment => OpKind::Augment,
        }
    }
}

impl fmt::Display for OpToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpToken::Mutate(q) => write!(f, "m{q}"),
            OpToken::Replicate(h) => write!(f, "R{h}"),
            OpToken::Multiply => f.write_str("M"),
            OpToken::Augment => f.write_str("A"),
        }
    }
}

/// Operation kind without operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpKind {
    Mutate,
    Replicate,
    Multiply,
    Augment,
}

impl OpKind {
    pub fn symbol(self) -> char {
        match self {
            OpKind::Mutate => 'm',
            OpKind::Replicate => 'R',
            OpKind::Multiply => 'M',
            OpKind::Augment => 'A',
        }
    }
}

/// Ordered operation history.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Trace(Vec<OpToken>);

impl Trace {
    pub fn new(tokens: Vec<OpToken>) -> Self {
        Trace(tokens)
    }

    pub fn tokens(&self) -> &[OpToken] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_tokens(self) -> Vec<OpToken> {
        self.0
    }

    /// Checks the shape every finished trace must have:
    ///
    /// * starts with a mutate whose quotient is non-zero,
    /// * ends with replicate then mutate and contains a multiply,
    /// * every replicate is immediately followed by a mutate,
    /// * every augment sits between a mutate and a replicate,
    /// * a zero quotient only appears directly after a replicate.
    pub fn validate(&self) -> Result<(), StructureError> {
        let t = &self.0;
        match t.first() {
            None => return Err(StructureError::Empty),
            Some(OpToken::Mutate(q)) if !q.is_zero() => {}
            Some(_) => return Err(StructureError::BadHead),
        }
        let n = t.len();
        let tail_ok = n >= 2 && matches!(t[n - 2], OpToken::Replicate(_)) && matches!(t[n - 1], OpToken::Mutate(_));
        if !tail_ok {
            return Err(StructureError::BadTail);
        }
        if !t.iter().any(|tok| matches!(tok, OpToken::Multiply)) {
            return Err(StructureError::MissingMultiply);
        }
        for (index, tok) in t.iter().enumerate() {
            let prev = index.checked_sub(1).map(|i| &t[i]);
            let next = t.get(index + 1);
            match tok {
                OpToken::Augment => {
                    let ok = matches!(prev, Some(OpToken::Mutate(_))) && matches!(next, Some(OpToken::Replicate(_)));
                    if !ok {
                        return Err(StructureError::MisplacedAugment { index });
                    }
                }
                OpToken::Replicate(_) => {
                    if !matches!(next, Some(OpToken::Mutate(_))) {
                        return Err(StructureError::UnmatchedReplicate { index });
                    }
                }
                OpToken::Mutate(q) if q.is_zero() && !matches!(prev, Some(OpToken::Replicate(_))) => {
                    return Err(StructureError::ZeroQuotient { index });
                }
                _ => {}
            }
        }
        Ok(())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for tok in &self.0 {
            write!(f, "{tok}")?;
        }
        Ok(())
    }
}

/// A complete trace plus its final remainder.
///
/// This is a reversible encoding, not secure encryption: the first token
/// alone reveals `floor(data / key)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CipherText {
    trace: Trace,
    remainder: DigitString,
}

impl CipherText {
    /// Builds a ciphertext, rejecting incomplete traces and non-canonical
    /// remainders. Whether the remainder is below the key is only known at
    /// decrypt time.
    pub fn new(trace: Trace, remainder: DigitString) -> Result<Self, StructureError> {
        trace.validate()?;
        if !remainder.is_canonical() {
            return Err(StructureError::NonCanonicalRemainder);
        }
        Ok(CipherText { trace, remainder })
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    pub fn remainder(&self) -> &DigitString {
        &self.remainder
    }

    pub fn augment_count(&self) -> usize {
        self.trace
            .tokens()
            .iter()
            .filter(|t| matches!(t, OpToken::Augment))
            .count()
    }
}

/// Canonical text form, `m11R2m4MR4m8 ~ 4`.
impl fmt::Display for CipherText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ {}", self.trace, self.remainder)
    }
}
