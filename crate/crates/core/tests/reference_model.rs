//! A second, independent implementation of the forward rules on plain
//! `u128`/`String` values, compared against the library over whole ranges,
//! plus regression fixtures computed with it.

use num_bigint::BigUint;
use ramm::analysis::{scan, trace_stats};
use ramm::{encrypt, KeyValue};

/// Returns the serialized ciphertext, or `None` past `max_ops`.
fn reference_encrypt(data: u128, key: u128, max_ops: usize) -> Option<String> {
    let mut cur = data.to_string();
    let mut out = String::new();
    let mut last = ' ';
    let mut next_growth = 'R';
    let (mut saw_r, mut saw_mul) = (false, false);
    for _ in 0..max_ops {
        if cur == "0" {
            out.push('A');
            cur = "01".into();
            next_growth = 'R';
            last = 'A';
            continue;
        }
        let v: u128 = cur.parse().unwrap();
        if v > key || last == 'R' {
            out.push_str(&format!("m{}", v / key));
            let before = last;
            cur = (v % key).to_string();
            last = 'm';
            // A mutate has just happened, so only replicate and multiply need tracking.
            if saw_r && saw_mul && before == 'R' {
                return Some(format!("{out} ~ {cur}"));
            }
            continue;
        }
        if next_growth == 'R' {
            out.push('R');
            out.push_str(&cur);
            cur = format!("{cur}{cur}");
            next_growth = 'M';
            saw_r = true;
            last = 'R';
        } else {
            out.push('M');
            cur = (v * v).to_string();
            next_growth = 'R';
            saw_mul = true;
            last = 'M';
        }
    }
    None
}

fn key(k: u64) -> KeyValue {
    KeyValue::try_from(k).unwrap()
}

#[test]
fn reference_agrees_on_golden_vectors() {
    assert_eq!(reference_encrypt(57, 5, 100).unwrap(), "m11R2m4MR4m8 ~ 4");
    assert_eq!(reference_encrypt(55, 5, 100).unwrap(), "m11AR01m20MR1m2 ~ 1");
    assert_eq!(reference_encrypt(202, 101, 1000), None);
}

#[test]
fn library_matches_reference_model() {
    let keys: Vec<u64> = (2..=60).chain([97, 99, 100, 102, 255, 1000, 1009, 4096]).collect();
    for &k in &keys {
        let kv = key(k);
        let mut values: Vec<u64> = (k + 1..k + 800).collect();
        values.extend((2..40).map(|m| k * m));
        values.extend([u32::MAX as u64, 10u64.pow(12) + 7]);
        for d in values {
            let want = reference_encrypt(d.into(), k.into(), 200).expect("terminates");
            let got = encrypt(&BigUint::from(d), &kv).unwrap().to_string();
            assert_eq!(got, want, "data {d} key {k}");
        }
    }
}

// Fixtures below were computed with the reference model and frozen.

#[test]
fn scan_fixture_key5_6_to_500() {
    let r = scan(&key(5), 6, 500).unwrap();
    assert_eq!(r.total, 495);
    assert!(r.is_clean());
    assert_eq!(r.max_ops_observed, 7);

    let s = trace_stats(&key(5), 6, 500).unwrap();
    assert_eq!((s.count, s.min_len, s.max_len, s.total_len), (495, 6, 7, 3267));
    assert_eq!(s.augmented, 99);
}

#[test]
fn augment_count_matches_zero_remainders() {
    // 199 values in [6, 1000] hit a zero remainder before terminating.
    let s = trace_stats(&key(5), 6, 1000).unwrap();
    assert_eq!(s.augmented, 199);
    assert_eq!(s.augment_tokens, 199);
}

#[test]
fn op_count_ceilings() {
    // Observed maxima over (k, 5000]; a rise signals a behavior change.
    for (k, ceiling) in [(2, 7), (3, 8), (5, 7), (10, 7), (97, 7)] {
        let r = scan(&key(k), k + 1, 5000).unwrap();
        assert!(r.is_clean(), "key {k}: {r}");
        assert_eq!(r.max_ops_observed, ceiling, "key {k}");
    }
}
