//! The self-test battery behind `clhash verify`: every fast path is checked
//! against the division-and-bit-loop oracle, the reduction table is
//! re-derived from scratch, and the field/key/stream plumbing is exercised.

use serde::Serialize;

use crate::clbits::{
    cl_rem, clmul128, clmul64, clmul64_hw, clmul64_portable, hw_clmul_available, is_irreducible,
    Poly256,
};
use crate::gf64::{gf64_pow, reduce128, Gf64Params, GF64_MODULUS, REDUCTION_TABLE};
use crate::hash::{clhash, clhash_portable, lazy_reduce127, HashConfig, GF127_MODULUS};
use crate::key::{ClKey, SplitMix64};
use crate::oracle;
use crate::stream::StreamState;

/// Hash of the message `0,1,...,255` under the key derived from seed 42 with
/// no finalizer, as computed by the straight-line oracle evaluator and
/// pinned here.
pub const GOLDEN_SEED: u64 = 42;
pub const GOLDEN_HASH: u64 = 0xd8e7_0e99_b771_8b4e;

/// Outcome of one suite: how many checks ran and how many failed.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub checks: u64,
    pub failures: u64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }
}

/// Knobs for the battery. `memo_table` is an injection point so a corrupted
/// table demonstrably fails the re-derivation suite; production callers use
/// the default.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Table expected to match a fresh derivation of `(w ⋆ 2^64) mod p`.
    pub memo_table: [u8; 16],
    /// Number of random inputs for the oracle-equivalence sweeps.
    pub random_checks: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            memo_table: REDUCTION_TABLE,
            random_checks: 1_000_000,
            seed: 0x5EED_CA11,
        }
    }
}

fn suite(name: &str, checks: u64, failures: u64) -> SuiteOutcome {
    SuiteOutcome {
        name: name.to_string(),
        checks,
        failures,
    }
}

/// Run the whole battery and report per-suite counts.
pub fn run_battery(opts: &VerifyOptions) -> VerifyReport {
    let mut suites = Vec::new();

    // reduction-table re-derivation against the division algorithm
    {
        let derived = Gf64Params::derive_memo_table();
        let failures = derived
            .iter()
            .zip(opts.memo_table.iter())
            .filter(|(a, b)| a != b)
            .count() as u64;
        suites.push(suite("reduction-table-rederivation", 16, failures));
    }

    // compiled-in constants are self-consistent
    {
        let ok = Gf64Params::standard().self_check().is_ok();
        suites.push(suite("reduction-table-constants", 1, u64::from(!ok)));
    }

    // moduli really are irreducible
    {
        let mut failures = 0;
        if !is_irreducible(GF64_MODULUS) {
            failures += 1;
        }
        if !is_irreducible(GF127_MODULUS) {
            failures += 1;
        }
        if is_irreducible(5) {
            failures += 1; // x²+1 must be recognized as reducible
        }
        suites.push(suite("modulus-irreducibility", 3, failures));
    }

    // portable multiplier vs the bit-loop oracle
    {
        let mut rng = SplitMix64::new(opts.seed);
        let n = (opts.random_checks / 100).max(100);
        let mut failures = 0;
        for _ in 0..n {
            let a = rng.next_u64();
            let b = rng.next_u64();
            if clmul64_portable(a, b) != oracle::clmul64_bitloop(a, b) {
                failures += 1;
            }
        }
        suites.push(suite("clmul-portable-vs-oracle", n, failures));
    }

    // hardware multiplier vs portable, when the instruction exists
    if hw_clmul_available() {
        let mut rng = SplitMix64::new(opts.seed ^ 1);
        let mut failures = 0;
        for _ in 0..opts.random_checks {
            let a = rng.next_u64();
            let b = rng.next_u64();
            if clmul64_hw(a, b) != Some(clmul64_portable(a, b)) {
                failures += 1;
            }
        }
        suites.push(suite("clmul-hardware-vs-portable", opts.random_checks, failures));
    }

    // fast reduction vs the division algorithm
    {
        let mut rng = SplitMix64::new(opts.seed ^ 2);
        let mut failures = 0;
        for _ in 0..opts.random_checks {
            let x = rng.next_u128();
            if reduce128(x) as u128 != cl_rem(Poly256::from(x), GF64_MODULUS) {
                failures += 1;
            }
        }
        suites.push(suite("reduce128-vs-division", opts.random_checks, failures));
    }

    // lazy reduction congruence
    {
        let mut rng = SplitMix64::new(opts.seed ^ 3);
        let n = (opts.random_checks / 10).max(100);
        let mut failures = 0;
        for _ in 0..n {
            let hi = rng.next_u128() & !(1u128 << 127);
            let x = Poly256::new(hi, rng.next_u128());
            let got = lazy_reduce127(x);
            if cl_rem(Poly256::from(got), GF127_MODULUS) != cl_rem(x, GF127_MODULUS) {
                failures += 1;
            }
        }
        suites.push(suite("lazy-reduction-congruence", n, failures));
    }

    // multiplicative group order: a^(2^64-1) = 1 for nonzero a
    {
        let mut rng = SplitMix64::new(opts.seed ^ 4);
        let n = 1000;
        let mut failures = 0;
        for _ in 0..n {
            let mut a = rng.next_u64();
            while a == 0 {
                a = rng.next_u64();
            }
            if gf64_pow(a, u64::MAX) != 1 {
                failures += 1;
            }
        }
        suites.push(suite("gf64-group-order", n, failures));
    }

    // end-to-end hash vs the straight-line oracle evaluator
    {
        let mut rng = SplitMix64::new(opts.seed ^ 5);
        let lengths = [0usize, 1, 8, 9, 100, 1023, 1024, 1025, 2048, 3000];
        let mut failures = 0;
        for &len in &lengths {
            let key = ClKey::derive(rng.next_u64());
            let mut msg = vec![0u8; len];
            rng.fill_bytes(&mut msg);
            for config in [HashConfig::raw(), HashConfig::finalized()] {
                if clhash(&key, &msg, config) != oracle::clhash_reference(&key, &msg, config) {
                    failures += 1;
                }
                if clhash_portable(&key, &msg, config) != clhash(&key, &msg, config) {
                    failures += 1;
                }
            }
        }
        suites.push(suite(
            "clhash-vs-reference",
            (lengths.len() * 4) as u64,
            failures,
        ));
    }

    // streaming equals one-shot over a spread of split points
    {
        let mut rng = SplitMix64::new(opts.seed ^ 6);
        let key = ClKey::derive(rng.next_u64());
        let mut msg = vec![0u8; 2100];
        rng.fill_bytes(&mut msg);
        let expected = clhash(&key, &msg, HashConfig::raw());
        let mut failures = 0;
        let mut checks = 0;
        for cut in (0..=msg.len()).step_by(41) {
            let mut s = StreamState::new(&key, HashConfig::raw());
            s.update(&msg[..cut]);
            s.update(&msg[cut..]);
            if s.finish() != expected {
                failures += 1;
            }
            checks += 1;
        }
        suites.push(suite("stream-vs-oneshot", checks, failures));
    }

    // pinned golden vector
    {
        let key = ClKey::derive(GOLDEN_SEED);
        let msg: Vec<u8> = (0u16..256).map(|b| b as u8).collect();
        let ok = clhash(&key, &msg, HashConfig::raw()) == GOLDEN_HASH;
        suites.push(suite("golden-vector", 1, u64::from(!ok)));
    }

    // spot-check the clmul128 decomposition against the oracle
    {
        let mut rng = SplitMix64::new(opts.seed ^ 7);
        let n = 200;
        let mut failures = 0;
        for _ in 0..n {
            let a = rng.next_u128();
            let b = rng.next_u128();
            if clmul128(a, b) != oracle::clmul128_bitloop(a, b) {
                failures += 1;
            }
        }
        suites.push(suite("clmul128-vs-oracle", n, failures));
    }

    // dispatching clmul64 agrees with itself through the public entry point
    {
        let mut rng = SplitMix64::new(opts.seed ^ 8);
        let n = 10_000;
        let mut failures = 0;
        for _ in 0..n {
            let a = rng.next_u64();
            let b = rng.next_u64();
            if clmul64(a, b) != clmul64_portable(a, b) {
                failures += 1;
            }
        }
        suites.push(suite("clmul-dispatch-consistency", n, failures));
    }

    VerifyReport { suites }
}
