//! Exhaustive checks over data ranges: round trip, fingerprint collisions,
//! termination, and trace-shape statistics.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::digits::KeyValue;
use crate::encrypt::{encrypt_with_limit, MAX_OPS};
use crate::error::Error;
use crate::trace::{CipherText, OpToken};

// Values encrypted per parallel batch.
const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scan range: need 2 <= key < from <= to (key {key}, from {lo}, to {hi})")]
pub struct RangeError {
    pub key: String,
    pub lo: u64,
    pub hi: u64,
}

fn check_range(key: &KeyValue, lo: u64, hi: u64) -> Result<(), RangeError> {
    if BigUint::from(lo) <= *key.value() || lo > hi {
        return Err(RangeError {
            key: key.to_string(),
            lo,
            hi,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub key: KeyValue,
    pub lo: u64,
    pub hi: u64,
    pub total: u64,
    pub round_trip_failures: Vec<u64>,
    /// Pairs `(first, later)` whose serialized ciphertexts are equal.
    pub collisions: Vec<(u64, u64)>,
    pub max_ops_observed: usize,
    pub nonterminating: Vec<u64>,
}

impl ScanReport {
    pub fn is_clean(&self) -> bool {
        self.round_trip_failures.is_empty() && self.collisions.is_empty() && self.nonterminating.is_empty()
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "key: {}", self.key)?;
        writeln!(f, "range: {}..={}", self.lo, self.hi)?;
        writeln!(f, "total: {}", self.total)?;
        writeln!(f, "round_trip_failures: {}", self.round_trip_failures.len())?;
        writeln!(f, "collisions: {}", self.collisions.len())?;
        writeln!(f, "nonterminating: {}", self.nonterminating.len())?;
        writeln!(f, "max_ops_observed: {}", self.max_ops_observed)?;
        for d in &self.round_trip_failures {
            writeln!(f, "failure: {d}")?;
        }
        for (a, b) in &self.collisions {
            writeln!(f, "collision: {a} {b}")?;
        }
        for d in &self.nonterminating {
            writeln!(f, "nonterminating: {d}")?;
        }
        Ok(())
    }
}

enum Outcome {
    Encrypted { text: String, ops: usize, round_trip: bool },
    NonTerminating,
    Failed,
}

fn run_one(d: u64, key: &KeyValue, max_ops: usize) -> Outcome {
    let data = BigUint::from(d);
    match encrypt_with_limit(&data, key, max_ops) {
        Ok(c) => Outcome::Encrypted {
            round_trip: crate::decrypt(&c, key).as_ref() == Ok(&data),
            ops: c.trace().len(),
            text: c.to_string(),
        },
        Err(Error::NonTerminating { .. }) => Outcome::NonTerminating,
        Err(_) => Outcome::Failed,
    }
}

fn chunks(lo: u64, hi: u64) -> impl Iterator<Item = (u64, u64)> {
    let mut next = Some(lo);
    std::iter::from_fn(move || {
        let start = next?;
        let end = start.saturating_add(CHUNK - 1).min(hi);
        next = if end == hi { None } else { Some(end + 1) };
        Some((start, end))
    })
}

/// Encrypts and decrypts every value in `[lo, hi]`.
pub fn scan(key: &KeyValue, lo: u64, hi: u64) -> Result<ScanReport, RangeError> {
    scan_with_limit(key, lo, hi, MAX_OPS)
}

pub fn scan_with_limit(key: &KeyValue, lo: u64, hi: u64, max_ops: usize) -> Result<ScanReport, RangeError> {
    check_range(key, lo, hi)?;
    let mut report = ScanReport {
        key: key.clone(),
        lo,
        hi,
        total: 0,
        round_trip_failures: Vec::new(),
        collisions: Vec::new(),
        max_ops_observed: 0,
        nonterminating: Vec::new(),
    };
    let mut seen: HashMap<String, u64> = HashMap::new();
    for (start, end) in chunks(lo, hi) {
        let outcomes: Vec<Outcome> = (start..=end)
            .into_par_iter()
            .map(|d| run_one(d, key, max_ops))
            .collect();
        // Merged in data order, so the report does not depend on scheduling.
        for (d, outcome) in (start..=end).zip(outcomes) {
            report.total += 1;
            match outcome {
                Outcome::Encrypted { text, ops, round_trip } => {
                    report.max_ops_observed = report.max_ops_observed.max(ops);
                    if !round_trip {
                        report.round_trip_failures.push(d);
                    }
                    if let Some(&first) = seen.get(&text) {
                        report.collisions.push((first, d));
                    } else {
                        seen.insert(text, d);
                    }
                }
                Outcome::NonTerminating => report.nonterminating.push(d),
                Outcome::Failed => report.round_trip_failures.push(d),
            }
        }
    }
    Ok(report)
}

/// Distribution of trace shapes over a range.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStats {
    pub key: KeyValue,
    pub lo: u64,
    pub hi: u64,
    /// Values that produced a ciphertext.
    pub count: u64,
    pub min_len: usize,
    pub max_len: usize,
    pub total_len: u64,
    /// Values whose trace contains at least one augment.
    pub augmented: u64,
    pub augment_tokens: u64,
    /// Mutates with quotient 0 (replicate did not exceed the key).
    pub zero_quotients: u64,
    /// Growth-op runs between consecutive mutates, e.g. `"R"`, `"MR"`, `"AR"`.
    pub gap_patterns: BTreeMap<String, u64>,
    pub failed: Vec<u64>,
}

impl TraceStats {
    pub fn mean_len(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.total_len as f64 / self.count as f64
        }
    }

    fn empty(key: &KeyValue, lo: u64, hi: u64) -> Self {
        TraceStats {
            key: key.clone(),
            lo,
            hi,
            count: 0,
            min_len: 0,
            max_len: 0,
            total_len: 0,
            augmented: 0,
            augment_tokens: 0,
            zero_quotients: 0,
            gap_patterns: BTreeMap::new(),
            failed: Vec::new(),
        }
    }

    fn add(&mut self, cipher: &CipherText) {
        let tokens = cipher.trace().tokens();
        let len = tokens.len();
        self.min_len = if self.count == 0 { len } else { self.min_len.min(len) };
        self.max_len = self.max_len.max(len);
        self.count += 1;
        self.total_len += len as u64;
        let augments = cipher.augment_count() as u64;
        self.augment_tokens += augments;
        self.augmented += u64::from(augments > 0);

        let mut gap = String::new();
        for tok in tokens {
            match tok {
                OpToken::Mutate(q) => {
                    if q == &BigUint::default() {
                        self.zero_quotients += 1;
                    }
                    if !gap.is_empty() {
                        *self.gap_patterns.entry(std::mem::take(&mut gap)).or_default() += 1;
                    }
                }
                other => gap.push(other.kind().symbol()),
            }
        }
    }
}

impl fmt::Display for TraceStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "key: {}", self.key)?;
        writeln!(f, "range: {}..={}", self.lo, self.hi)?;
        writeln!(f, "count: {}", self.count)?;
        writeln!(f, "trace_len_min: {}", self.min_len)?;
        writeln!(f, "trace_len_mean: {:.3}", self.mean_len())?;
        writeln!(f, "trace_len_max: {}", self.max_len)?;
        writeln!(f, "augmented: {}", self.augmented)?;
        writeln!(f, "augment_tokens: {}", self.augment_tokens)?;
        writeln!(f, "zero_quotients: {}", self.zero_quotients)?;
        writeln!(f, "failed: {}", self.failed.len())?;
        for (pattern, n) in &self.gap_patterns {
            writeln!(f, "gap {pattern}: {n}")?;
        }
        Ok(())
    }
}

pub fn trace_stats(key: &KeyValue, lo: u64, hi: u64) -> Result<TraceStats, RangeError> {
    trace_stats_with_limit(key, lo, hi, MAX_OPS)
}

pub fn trace_stats_with_limit(key: &KeyValue, lo: u64, hi: u64, max_ops: usize) -> Result<TraceStats, RangeError> {
    check_range(key, lo, hi)?;
    let mut stats = TraceStats::empty(key, lo, hi);
    for (start, end) in chunks(lo, hi) {
        let ciphers: Vec<Result<CipherText, Error>> = (start..=end)
            .into_par_iter()
            .map(|d| encrypt_with_limit(&BigUint::from(d), key, max_ops))
            .collect();
        for (d, c) in (start..=end).zip(ciphers) {
            match c {
                Ok(c) => stats.add(&c),
                Err(_) => stats.failed.push(d),
            }
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(k: u64) -> KeyValue {
        KeyValue::try_from(k).unwrap()
    }

    #[test]
    fn chunking_covers_range() {
        let got: Vec<_> = chunks(5, 5).collect();
        assert_eq!(got, vec![(5, 5)]);
        let got: Vec<_> = chunks(1, 2 * CHUNK + 3).collect();
        assert_eq!(got.len(), 3);
        assert_eq!(got[0].0, 1);
        assert_eq!(got[2].1, 2 * CHUNK + 3);
        for w in got.windows(2) {
            assert_eq!(w[0].1 + 1, w[1].0);
        }
        assert_eq!(chunks(u64::MAX - 1, u64::MAX).count(), 1);
    }

    #[test]
    fn range_checks() {
        assert!(scan(&key(5), 4, 10).is_err());
        assert!(scan(&key(5), 5, 10).is_err());
        assert!(scan(&key(5), 10, 9).is_err());
        assert!(trace_stats(&key(5), 5, 10).is_err());
    }

    #[test]
    fn singleton_scans() {
        let r = scan(&key(5), 57, 57).unwrap();
        assert!(r.is_clean());
        assert_eq!((r.total, r.max_ops_observed), (1, 6));
        let r = scan(&key(5), 6, 6).unwrap();
        assert!(r.collisions.is_empty());
    }

    #[test]
    fn stats_for_golden_examples() {
        let s = trace_stats(&key(5), 57, 57).unwrap();
        assert_eq!((s.min_len, s.max_len, s.augmented), (6, 6, 0));
        assert_eq!(s.gap_patterns.get("R"), Some(&1));
        assert_eq!(s.gap_patterns.get("MR"), Some(&1));
        let s = trace_stats(&key(5), 55, 55).unwrap();
        assert_eq!((s.min_len, s.max_len, s.augmented, s.augment_tokens), (7, 7, 1, 1));
        assert_eq!(s.gap_patterns.get("AR"), Some(&1));
    }

    #[test]
    fn nonterminating_values_are_reported() {
        let r = scan(&key(101), 202, 203).unwrap();
        assert_eq!(r.nonterminating, vec![202]);
        assert!(!r.is_clean());
        assert!(r.to_string().contains("nonterminating: 202"));
    }
}
