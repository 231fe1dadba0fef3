//! Forward direction: the encryption state machine.
//!
//! A run starts with a mutate of the data by the key and then loops:
//!
//! * a zero remainder is augmented to `"01"` and the next op is forced to be
//!   a replicate (multiplying `"01"` would drop its leading zero);
//! * directly after a replicate the value is always mutated, even when it does
//!   not exceed the key (quotient 0);
//! * otherwise a value above the key is mutated, and a value at or below it
//!   gets the next growth op. Growth ops alternate replicate, multiply,
//!   replicate, ... across the whole run.
//!
//! The run stops after a mutate once mutate, replicate and multiply have all
//! been used and the last two ops were replicate then mutate.

use num_bigint::BigUint;

use crate::digits::{DigitString, KeyValue};
use crate::error::Error;
use crate::ops::{augment_step, multiply_step, mutate_step, replicate_step};
use crate::trace::{CipherText, OpKind, OpToken, Trace};

/// Default cap on the number of operations in one run.
pub const MAX_OPS: usize = 10_000;

/// Which growth op fires next when the value does not exceed the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthCursor {
    NextReplicate,
    NextMultiply,
}

/// In-progress encryption.
#[derive(Debug, Clone)]
pub struct EncryptState {
    current: DigitString,
    history: Vec<OpToken>,
    cursor: GrowthCursor,
    used_mutate: bool,
    used_replicate: bool,
    used_multiply: bool,
    step_count: usize,
}

impl EncryptState {
    pub fn new(data: &BigUint, key: &KeyValue) -> Result<Self, Error> {
        if data <= key.value() {
            return Err(Error::DataNotGreaterThanKey);
        }
        Ok(EncryptState {
            current: DigitString::from_value(data),
            history: Vec::new(),
            cursor: GrowthCursor::NextReplicate,
            used_mutate: false,
            used_replicate: false,
            used_multiply: false,
            step_count: 0,
        })
    }

    pub fn current(&self) -> &DigitString {
        &self.current
    }

    pub fn history(&self) -> &[OpToken] {
        &self.history
    }

    pub fn cursor(&self) -> GrowthCursor {
        self.cursor
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn is_terminated(&self) -> bool {
        self.used_mutate && self.used_replicate && self.used_multiply && ends_with_replicate_mutate(&self.history)
    }

    /// Applies the next operation and returns its kind.
    pub fn step(&mut self, key: &KeyValue) -> Result<OpKind, Error> {
        let kind = select_next_op(self, key);
        let token = match kind {
            OpKind::Augment => {
                self.current = augment_step(&self.current)?;
                self.cursor = GrowthCursor::NextReplicate;
                OpToken::Augment
            }
            OpKind::Mutate => {
                let (quotient, remainder) = mutate_step(&self.current.value(), key)?;
                self.current = remainder;
                self.used_mutate = true;
                OpToken::Mutate(quotient)
            }
            OpKind::Replicate => {
                let half = self.current.clone();
                self.current = replicate_step(&half)?;
                self.cursor = GrowthCursor::NextMultiply;
                self.used_replicate = true;
                OpToken::Replicate(half)
            }
            OpKind::Multiply => {
                self.current = multiply_step(&self.current)?;
                self.cursor = GrowthCursor::NextReplicate;
                self.used_multiply = true;
                OpToken::Multiply
            }
        };
        self.history.push(token);
        self.step_count += 1;
        Ok(kind)
    }

    /// Converts a terminated run into its ciphertext.
    pub fn finish(self) -> Result<CipherText, Error> {
        let trace = Trace::new(self.history);
        Ok(CipherText::new(trace, self.current)?)
    }
}

fn ends_with_replicate_mutate(history: &[OpToken]) -> bool {
    matches!(history, [.., OpToken::Replicate(_), OpToken::Mutate(_)])
}

/// True once mutate, replicate and multiply have each appeared and the
/// history ends with replicate then mutate.
pub fn check_termination(history: &[OpToken]) -> bool {
    let has = |k: OpKind| history.iter().any(|t| t.kind() == k);
    has(OpKind::Mutate) && has(OpKind::Replicate) && has(OpKind::Multiply) && ends_with_replicate_mutate(history)
}

/// Chooses the next operation for a run that has not terminated.
pub fn select_next_op(state: &EncryptState, key: &KeyValue) -> OpKind {
    if state.current.is_zero_literal() {
        return OpKind::Augment;
    }
    let after_replicate = matches!(state.history.last(), Some(OpToken::Replicate(_)));
    if after_replicate || state.current.value() > *key.value() {
        return OpKind::Mutate;
    }
    match state.cursor {
        GrowthCursor::NextReplicate => OpKind::Replicate,
        GrowthCursor::NextMultiply => OpKind::Multiply,
    }
}

/// Encrypts `data` under `key` with the default operation cap.
pub fn encrypt(data: &BigUint, key: &KeyValue) -> Result<CipherText, Error> {
    encrypt_with_limit(data, key, MAX_OPS)
}

/// Encrypts with an explicit operation cap.
pub fn encrypt_with_limit(data: &BigUint, key: &KeyValue, max_ops: usize) -> Result<CipherText, Error> {
    let mut state = EncryptState::new(data, key)?;
    while !state.is_terminated() {
        if state.step_count >= max_ops {
            return Err(Error::NonTerminating { max_ops });
        }
        state.step(key)?;
    }
    state.finish()
}
