//! Slow reference implementations, kept deliberately naive.
//!
//! Everything here is built from two pieces only: a bit-by-bit carry-less
//! multiply (each output bit computed as an explicit XOR-convolution) and the
//! Euclidean division in [`crate::clbits::cl_divmod`]. None of the fast
//! reductions, table lookups, or hardware paths are used, so these functions
//! serve as independent referees for them. The self-test battery and the
//! test suites compare the production paths against this module.

use crate::clbits::{cl_divmod, cl_rem, Poly256};
use crate::hash::{HashConfig, GF127_MODULUS, SHORT_INPUT_THRESHOLD};
use crate::key::ClKey;

/// Carry-less multiply evaluated one output bit at a time:
/// bit `i` of the product is the XOR over `k` of `a_(i-k) · b_k`.
pub fn clmul64_bitloop(a: u64, b: u64) -> u128 {
    let mut out = 0u128;
    for i in 0..128u32 {
        let mut bit = 0u64;
        for k in 0..64u32 {
            if k > i || i - k > 63 {
                continue;
            }
            bit ^= ((a >> (i - k)) & 1) & ((b >> k) & 1);
        }
        out |= (bit as u128) << i;
    }
    out
}

/// 256-bit variant of the bit-by-bit multiply.
pub fn clmul128_bitloop(a: u128, b: u128) -> Poly256 {
    let mut hi = 0u128;
    let mut lo = 0u128;
    for i in 0..256u32 {
        let mut bit = 0u128;
        for k in 0..128u32 {
            if k > i || i - k > 127 {
                continue;
            }
            bit ^= ((a >> (i - k)) & 1) & ((b >> k) & 1);
        }
        if i < 128 {
            lo |= bit << i;
        } else {
            hi |= bit << (i - 128);
        }
    }
    Poly256::new(hi, lo)
}

/// Multiplication in GF(2^127), oracle route: bit-loop multiply, then the
/// division algorithm against `2^127 + 2 + 1`.
pub fn gf127_mul(a: u128, b: u128) -> u128 {
    cl_rem(clmul128_bitloop(a, b), GF127_MODULUS)
}

/// Exponentiation in GF(2^127) on the oracle route.
pub fn gf127_pow(a: u128, e: u64) -> u128 {
    let mut acc = 1u128;
    let mut base = a;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = gf127_mul(acc, base);
        }
        base = gf127_mul(base, base);
        e >>= 1;
    }
    acc
}

fn words_le(bytes: &[u8]) -> Vec<u64> {
    let mut words = Vec::with_capacity(bytes.len().div_ceil(8));
    for chunk in bytes.chunks(8) {
        let mut buf = [0u8; 8];
        buf[..chunk.len()].copy_from_slice(chunk);
        words.push(u64::from_le_bytes(buf));
    }
    words
}

fn clnh_bitloop(words: &[u64], keys: &[u64]) -> u128 {
    let mut acc = 0u128;
    let mut i = 0;
    while i < words.len() {
        let s1 = words[i];
        let s2 = if i + 1 < words.len() { words[i + 1] } else { 0 };
        acc ^= clmul64_bitloop(s1 ^ keys[i], s2 ^ keys[i + 1]);
        i += 2;
    }
    acc
}

/// Straight-line evaluation of the whole hash on the oracle route.
///
/// Packs bytes itself, multiplies with the bit loop, and performs every
/// reduction with the division algorithm: the block-combining steps reduce
/// modulo `(2^127 + 2 + 1) ⋆ 2 = 2^128 + 4 + 2` (the same value the lazy
/// reduction computes) and the final step reduces modulo `2^64 ⊕ 27`.
pub fn clhash_reference(key: &ClKey, message: &[u8], config: HashConfig) -> u64 {
    let gf64_p = (1u128 << 64) | 27;
    let lazy_p = Poly256::from(GF127_MODULUS).shl(1); // 2^128 + 4 + 2

    let h = if message.len() <= SHORT_INPUT_THRESHOLD {
        let words = words_le(message);
        let inner = clnh_bitloop(&words, &key.block_keys);
        let length_term = clmul64_bitloop(key.length_key, message.len() as u64);
        cl_rem(Poly256::from(inner ^ length_term), gf64_p) as u64
    } else {
        let mut acc = 0u128;
        let mut first = true;
        for block in message.chunks(1024) {
            let mut words = words_le(block);
            words.resize(128, 0);
            let a = clnh_bitloop(&words, &key.block_keys);
            if first {
                acc = a;
                first = false;
            } else {
                let product = clmul128_bitloop(key.poly_key, acc);
                let reduced = cl_divmod(product, lazy_p)
                    .expect("lazy modulus is nonzero")
                    .remainder
                    .expect_u128();
                acc = reduced ^ a;
            }
        }
        let (k1, k2) = key.final_key_words();
        let (o1, o2) = (acc as u64, (acc >> 64) as u64);
        let compressed = clmul64_bitloop(o1 ^ k1, o2 ^ k2);
        let length_term = clmul64_bitloop(key.length_key, message.len() as u64);
        cl_rem(Poly256::from(compressed ^ length_term), gf64_p) as u64
    };

    if config.finalize {
        let mut x = h;
        x ^= x >> 33;
        x = x.wrapping_mul(18397679294719823053);
        x ^= x >> 33;
        x = x.wrapping_mul(14181476777654086739);
        x ^= x >> 33;
        x
    } else {
        h
    }
}
