//! Statistical validation: avalanche matrices, sparse-input collision
//! sweeps, and empirical checks of the truncated-output universality bound.
//!
//! Every test here is deterministic given its seed and parameters. Trials
//! are independent, so the heavy loops run on a thread pool; per-trial seeds
//! are fixed up front and counters are combined by addition, which makes the
//! aggregate independent of scheduling.
//!
//! Collision gates are one-sided with an explicit Poisson tail: a run fails
//! only when the observed count exceeds the expected bound by more than
//! [`POISSON_SLACK_SIGMA`] standard deviations. Zero collisions never fails.

use rayon::prelude::*;
use serde::Serialize;

use crate::hash::{clhash, HashConfig, SHORT_INPUT_THRESHOLD};
use crate::key::{ClKey, SplitMix64};

/// Worst-case per-bit avalanche bias accepted by the gate, at 10^5 trials.
/// Harness policy, not a theoretical constant.
pub const AVALANCHE_BIAS_GATE: f64 = 0.03;

/// One-sided slack on collision gates, in Poisson standard deviations.
pub const POISSON_SLACK_SIGMA: f64 = 5.0;

/// Collision probability bound for messages that fit one block: exactly
/// XOR-universal, so 2^-64.
pub const SHORT_EPSILON: f64 = 1.0 / 18446744073709551616.0;

/// Collision probability bound for longer messages: 2.004 × 2^-64.
pub const LONG_EPSILON: f64 = 2.004 / 18446744073709551616.0;

/// Smallest trial count [`avalanche_test`] accepts.
pub const MIN_AVALANCHE_TRIALS: u64 = 10_000;

/// Per-bit avalanche measurement.
///
/// `bias[j][i]` is `|P(output bit j flips | input bit i flipped) - 0.5|`,
/// estimated over `trials` random inputs: 64 rows, one per output bit, and
/// `8 × input_len` columns, one per input bit.
#[derive(Debug, Clone, Serialize)]
pub struct AvalancheReport {
    pub description: String,
    pub input_len: usize,
    pub trials: u64,
    pub finalize: bool,
    pub worst_bias: f64,
    pub bias: Vec<Vec<f64>>,
}

impl AvalancheReport {
    /// The SMHasher-style gate: worst per-bit bias under the policy limit.
    pub fn passes(&self) -> bool {
        self.worst_bias < AVALANCHE_BIAS_GATE
    }
}

/// Outcome of a collision sweep, with the bound the count is gated against.
#[derive(Debug, Clone, Serialize)]
pub struct CollisionReport {
    pub description: String,
    pub trials: u64,
    pub collisions: u64,
    pub truncation_bits: Option<u32>,
    pub bound: f64,
}

impl CollisionReport {
    /// One-sided Poisson gate: too many collisions fails, zero never does.
    pub fn passes(&self) -> bool {
        (self.collisions as f64) <= self.bound + POISSON_SLACK_SIGMA * self.bound.sqrt()
    }
}

/// Inputs to a statistical run were unusable.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatError {
    #[error("the two messages must differ")]
    IdenticalMessages,
    #[error("truncation width {0} outside the observable range 8..=24")]
    TruncationBitsOutOfRange(u32),
}

/// Measure how each input bit flip moves each output bit.
///
/// For every input bit position, `trials` random inputs are hashed with and
/// without that bit flipped and the per-output-bit flip frequencies are
/// tallied. Requires `trials >= 10^4`.
pub fn avalanche_test(
    key: &ClKey,
    input_len: usize,
    trials: u64,
    config: HashConfig,
    seed: u64,
) -> AvalancheReport {
    assert!(
        trials >= MIN_AVALANCHE_TRIALS,
        "avalanche needs at least {MIN_AVALANCHE_TRIALS} trials"
    );
    assert!(input_len > 0 && input_len <= SHORT_INPUT_THRESHOLD);
    let input_bits = input_len * 8;

    let mut seeder = SplitMix64::new(seed);
    let trial_seeds: Vec<u64> = (0..trials).map(|_| seeder.next_u64()).collect();

    // flip counters indexed [input_bit][output_bit]
    let zero = || vec![[0u64; 64]; input_bits];
    let counts = trial_seeds
        .par_chunks(1024)
        .map(|chunk| {
            let mut local = zero();
            let mut input = vec![0u8; input_len];
            for &s in chunk {
                let mut rng = SplitMix64::new(s);
                rng.fill_bytes(&mut input);
                let base = clhash(key, &input, config);
                for bit in 0..input_bits {
                    input[bit / 8] ^= 1 << (bit % 8);
                    let flipped = clhash(key, &input, config);
                    input[bit / 8] ^= 1 << (bit % 8);
                    let diff = base ^ flipped;
                    let row = &mut local[bit];
                    for (j, slot) in row.iter_mut().enumerate() {
                        *slot += (diff >> j) & 1;
                    }
                }
            }
            local
        })
        .reduce(zero, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b.iter()) {
                for (ca, cb) in ra.iter_mut().zip(rb.iter()) {
                    *ca += cb;
                }
            }
            a
        });

    let mut bias = vec![vec![0f64; input_bits]; 64];
    let mut worst = 0f64;
    for (i, row) in counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            let b = (c as f64 / trials as f64 - 0.5).abs();
            bias[j][i] = b;
            if b > worst {
                worst = b;
            }
        }
    }

    AvalancheReport {
        description: format!(
            "avalanche: {input_len}-byte inputs, {trials} trials, finalize={}",
            config.finalize
        ),
        input_len,
        trials,
        finalize: config.finalize,
        worst_bias: worst,
        bias,
    }
}

/// Inclusive length range of the sparse-input sweep.
pub const TWOBYTES_LENGTHS: std::ops::RangeInclusive<usize> = 4..=20;

/// Hash every input with at most two non-zero bytes for each length in
/// `[4, 20]` and count equal full-width hash pairs. The enumeration visits
/// each distinct input exactly once, so every equal pair is a real collision.
pub fn twobytes_test(key: &ClKey, config: HashConfig) -> CollisionReport {
    twobytes_test_over(key, config, TWOBYTES_LENGTHS)
}

/// Work unit of the sparse sweep: one input shape at one length.
enum SparseTask {
    AllZero { len: usize },
    OneByte { len: usize, pos: usize },
    TwoBytes { len: usize, a: usize, b: usize },
}

pub(crate) fn twobytes_test_over(
    key: &ClKey,
    config: HashConfig,
    lengths: std::ops::RangeInclusive<usize>,
) -> CollisionReport {
    assert!(*lengths.end() <= 64);
    let mut tasks = Vec::new();
    for len in lengths.clone() {
        tasks.push(SparseTask::AllZero { len });
        for pos in 0..len {
            tasks.push(SparseTask::OneByte { len, pos });
        }
        for a in 0..len {
            for b in a + 1..len {
                tasks.push(SparseTask::TwoBytes { len, a, b });
            }
        }
    }

    let mut hashes: Vec<u64> = tasks
        .par_iter()
        .map(|task| {
            let mut buf = [0u8; 64];
            let mut out = Vec::new();
            match *task {
                SparseTask::AllZero { len } => {
                    out.push(clhash(key, &buf[..len], config));
                }
                SparseTask::OneByte { len, pos } => {
                    out.reserve(255);
                    for v in 1..=255u8 {
                        buf[pos] = v;
                        out.push(clhash(key, &buf[..len], config));
                    }
                }
                SparseTask::TwoBytes { len, a, b } => {
                    out.reserve(255 * 255);
                    for va in 1..=255u8 {
                        buf[a] = va;
                        for vb in 1..=255u8 {
                            buf[b] = vb;
                            out.push(clhash(key, &buf[..len], config));
                        }
                    }
                }
            }
            out
        })
        .flatten()
        .collect();

    let inputs = hashes.len() as u64;
    hashes.par_sort_unstable();
    let mut collisions = 0u64;
    let mut run = 1u64;
    for w in hashes.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            collisions += run * (run - 1) / 2;
            run = 1;
        }
    }
    collisions += run * (run - 1) / 2;

    let pairs = inputs as f64 * (inputs as f64 - 1.0) / 2.0;
    CollisionReport {
        description: format!(
            "two-byte sweep: lengths {}..={}, {} inputs, full 64-bit collisions",
            lengths.start(),
            lengths.end(),
            inputs
        ),
        trials: inputs,
        collisions,
        truncation_bits: None,
        bound: pairs * SHORT_EPSILON,
    }
}

/// Estimate the truncated-output collision rate of a fixed message pair over
/// independent keys.
///
/// Draws `key_trials` keys, hashes both messages raw, and counts matches of
/// the low `truncation_bits` bits. The reported bound is
/// `2^(64 - L') × ε × key_trials`, with ε picked by length class: truncating
/// an ε-almost-XOR-universal family to L' bits multiplies ε by `2^(64-L')`.
pub fn lowbit_universality_test(
    s: &[u8],
    s_prime: &[u8],
    truncation_bits: u32,
    key_trials: u64,
    seed: u64,
) -> Result<CollisionReport, StatError> {
    if s == s_prime {
        return Err(StatError::IdenticalMessages);
    }
    if !(8..=24).contains(&truncation_bits) {
        return Err(StatError::TruncationBitsOutOfRange(truncation_bits));
    }

    let epsilon = if s.len() <= SHORT_INPUT_THRESHOLD && s_prime.len() <= SHORT_INPUT_THRESHOLD {
        SHORT_EPSILON
    } else {
        LONG_EPSILON
    };
    let mask = (1u64 << truncation_bits) - 1;

    let mut seeder = SplitMix64::new(seed);
    let key_seeds: Vec<u64> = (0..key_trials).map(|_| seeder.next_u64()).collect();

    let collisions: u64 = key_seeds
        .par_iter()
        .map(|&ks| {
            let key = ClKey::derive(ks);
            let ha = clhash(&key, s, HashConfig::raw());
            let hb = clhash(&key, s_prime, HashConfig::raw());
            u64::from(ha & mask == hb & mask)
        })
        .sum();

    let bound = (2f64).powi(64 - truncation_bits as i32) * epsilon * key_trials as f64;
    Ok(CollisionReport {
        description: format!(
            "low-bit universality: |s|={}, |s'|={}, L'={truncation_bits}, {key_trials} keys",
            s.len(),
            s_prime.len()
        ),
        trials: key_trials,
        collisions,
        truncation_bits: Some(truncation_bits),
        bound,
    })
}

/// For each single-bit delta `d` on 8-byte inputs, report whether
/// `h(x ⊕ d) ⊕ h(x)` is the same value across `trials` random `x`.
///
/// With the finalizer off this is the hash's short-input linearity, and
/// every entry comes back `true`; the finalizer breaks it, which is exactly
/// why it makes avalanche tests pass.
pub fn delta_constancy_scan(
    key: &ClKey,
    config: HashConfig,
    trials: u64,
    seed: u64,
) -> Vec<bool> {
    (0..64u32)
        .into_par_iter()
        .map(|bit| {
            let d = 1u64 << bit;
            let mut rng = SplitMix64::new(seed.wrapping_add(bit as u64));
            let mut reference = None;
            for _ in 0..trials {
                let x = rng.next_u64();
                let diff = clhash(key, &x.to_le_bytes(), config)
                    ^ clhash(key, &(x ^ d).to_le_bytes(), config);
                match reference {
                    None => reference = Some(diff),
                    Some(r) if r != diff => return false,
                    Some(_) => {}
                }
            }
            true
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn avalanche_reports_are_deterministic() {
        let key = ClKey::derive(1);
        let a = avalanche_test(&key, 8, 10_000, HashConfig::finalized(), 7);
        let b = avalanche_test(&key, 8, 10_000, HashConfig::finalized(), 7);
        assert_eq!(a.worst_bias, b.worst_bias);
        assert_eq!(a.bias, b.bias);
        assert_eq!(a.bias.len(), 64);
        assert_eq!(a.bias[0].len(), 64);
    }

    #[test]
    fn avalanche_bias_entries_stay_in_range() {
        let key = ClKey::derive(2);
        let report = avalanche_test(&key, 8, 10_000, HashConfig::finalized(), 8);
        for row in &report.bias {
            for &b in row {
                assert!((0.0..=0.5).contains(&b));
            }
        }
    }

    #[test]
    #[should_panic(expected = "at least")]
    fn avalanche_rejects_tiny_trial_counts() {
        let key = ClKey::derive(3);
        avalanche_test(&key, 8, 100, HashConfig::finalized(), 9);
    }

    #[test]
    fn raw_hash_avalanche_bias_is_exactly_half() {
        // linear short-input behavior: every output bit either always or
        // never flips, so every bias entry sits at 0.5
        let key = ClKey::derive(4);
        let report = avalanche_test(&key, 8, 10_000, HashConfig::raw(), 10);
        assert_eq!(report.worst_bias, 0.5);
        assert!(!report.passes());
        assert!(report
            .bias
            .iter()
            .all(|row| row.iter().all(|&b| b == 0.5)));
    }

    #[test]
    fn finalized_zero_and_one_bit_messages_differ() {
        let key = ClKey::derive(5);
        let zero = [0u8; 8];
        let mut one_bit = [0u8; 8];
        one_bit[0] = 1;
        assert_ne!(
            clhash(&key, &zero, HashConfig::finalized()),
            clhash(&key, &one_bit, HashConfig::finalized())
        );
    }

    #[test]
    fn sparse_sweep_small_range_has_no_collisions() {
        let key = ClKey::derive(6);
        let report = twobytes_test_over(&key, HashConfig::raw(), 4..=6);
        // 3 all-zero + 15·255 one-byte + (6+10+15)·255² two-byte inputs
        assert_eq!(report.trials, 3 + 15 * 255 + 31 * 255 * 255);
        assert_eq!(report.collisions, 0);
        assert!(report.passes());
    }

    #[test]
    fn all_zero_inputs_of_distinct_lengths_do_not_collide() {
        let key = ClKey::derive(7);
        let mut hashes: Vec<u64> = (4..=20)
            .map(|len| clhash(&key, &vec![0u8; len], HashConfig::raw()))
            .collect();
        hashes.sort_unstable();
        hashes.dedup();
        assert_eq!(hashes.len(), 17);
    }

    #[test]
    fn lowbit_test_rejects_identical_messages() {
        assert_eq!(
            lowbit_universality_test(b"same", b"same", 16, 10, 1).unwrap_err(),
            StatError::IdenticalMessages
        );
    }

    #[test]
    fn lowbit_test_rejects_unobservable_widths() {
        assert!(matches!(
            lowbit_universality_test(b"a", b"b", 40, 10, 1),
            Err(StatError::TruncationBitsOutOfRange(40))
        ));
        assert!(matches!(
            lowbit_universality_test(b"a", b"b", 4, 10, 1),
            Err(StatError::TruncationBitsOutOfRange(4))
        ));
    }

    #[test]
    fn lowbit_bound_uses_long_epsilon_past_one_block() {
        let short = lowbit_universality_test(&[1u8; 64], &[2u8; 64], 16, 1000, 3).unwrap();
        let long = lowbit_universality_test(&[1u8; 2048], &[2u8; 2048], 16, 1000, 3).unwrap();
        assert!(long.bound > short.bound);
        let ratio = long.bound / short.bound;
        assert!((ratio - 2.004).abs() < 1e-9);
        assert_eq!(short.truncation_bits, Some(16));
    }

    #[test]
    fn lowbit_counts_are_deterministic_and_sane() {
        let a = lowbit_universality_test(&[1u8; 64], &[2u8; 64], 8, 20_000, 11).unwrap();
        let b = lowbit_universality_test(&[1u8; 64], &[2u8; 64], 8, 20_000, 11).unwrap();
        assert_eq!(a.collisions, b.collisions);
        // expected about 20000/256 ≈ 78; the gate allows bound + 5σ
        assert!(a.passes(), "collisions={} bound={}", a.collisions, a.bound);
        assert!(a.collisions > 0, "8-bit truncation should show collisions");
    }

    #[test]
    fn delta_scan_is_all_constant_raw_and_none_finalized() {
        let key = ClKey::derive(8);
        let raw = delta_constancy_scan(&key, HashConfig::raw(), 500, 21);
        assert!(raw.iter().all(|&c| c));
        let fin = delta_constancy_scan(&key, HashConfig::finalized(), 500, 21);
        assert!(fin.iter().all(|&c| !c));
    }

    #[test]
    fn collision_gate_is_one_sided() {
        let zero = CollisionReport {
            description: String::new(),
            trials: 100,
            collisions: 0,
            truncation_bits: None,
            bound: 0.0,
        };
        assert!(zero.passes());
        let too_many = CollisionReport {
            collisions: 50,
            bound: 10.0,
            ..zero.clone()
        };
        assert!(!too_many.passes());
        let within = CollisionReport {
            collisions: 12,
            bound: 10.0,
            ..zero
        };
        assert!(within.passes());
    }
}
