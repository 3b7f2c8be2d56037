//! The hash itself: inner word-pair block hashing (CLNH), polynomial block
//! combining over GF(2^127) with a lazy reduction, length mixing, and the
//! optional bit-mixing finalizer.
//!
//! Message bytes are packed into 64-bit little-endian words. Messages of up
//! to 1024 bytes are hashed with a single CLNH evaluation; longer messages
//! are split into 1024-byte blocks whose CLNH values are folded with
//! Horner's rule, `acc ← poly_key ⋆ acc ⊕ block`, reducing lazily between
//! steps. Either way a length term `length_key ⋆ |M|` is XORed in before
//! the final reduction modulo `2^64 ⊕ 27`, so equal prefixes of different
//! lengths separate.

use crate::clbits::{clmul128_backend, ClmulBackend, Poly256, PortableBackend};
use crate::gf64::reduce128_backend;
use crate::key::{ClKey, BLOCK_KEY_WORDS};

/// Messages of at most this many bytes take the single-block path.
pub const SHORT_INPUT_THRESHOLD: usize = 1024;

/// Bytes per block on the long-input path.
pub const BLOCK_BYTES: usize = 1024;

/// The degree-127 irreducible modulus `2^127 + 2 + 1` for block combining.
pub const GF127_MODULUS: u128 = (1u128 << 127) | 3;

/// Hashing options.
///
/// The single-block threshold is fixed at [`SHORT_INPUT_THRESHOLD`]; the only
/// choice is whether to append the bit-mixing finalizer. Raw output keeps the
/// family's universality guarantees and its short-input linearity; finalized
/// output trades the linearity for avalanche behavior.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct HashConfig {
    pub finalize: bool,
}

impl HashConfig {
    pub const fn raw() -> Self {
        HashConfig { finalize: false }
    }

    pub const fn finalized() -> Self {
        HashConfig { finalize: true }
    }

    pub const fn short_threshold(&self) -> usize {
        SHORT_INPUT_THRESHOLD
    }
}

/// Pack bytes into little-endian 64-bit words, zero-padding the last partial
/// word. Returns the word count. `words` must be zeroed beforehand.
#[inline(always)]
pub(crate) fn pack_words_le(bytes: &[u8], words: &mut [u64; BLOCK_KEY_WORDS]) -> usize {
    debug_assert!(bytes.len() <= BLOCK_BYTES);
    let mut full = bytes.chunks_exact(8);
    let mut n = 0;
    for chunk in &mut full {
        words[n] = u64::from_le_bytes(chunk.try_into().unwrap());
        n += 1;
    }
    let tail = full.remainder();
    if !tail.is_empty() {
        let mut buf = [0u8; 8];
        buf[..tail.len()].copy_from_slice(tail);
        words[n] = u64::from_le_bytes(buf);
        n += 1;
    }
    n
}

#[inline(always)]
pub(crate) fn clnh_backend<E: ClmulBackend>(words: &[u64], keys: &[u64]) -> u128 {
    let mut acc = 0u128;
    let mut i = 0;
    while i + 1 < words.len() {
        acc ^= E::mul64(words[i] ^ keys[i], words[i + 1] ^ keys[i + 1]);
        i += 2;
    }
    if words.len() % 2 == 1 {
        // odd length: the input is padded with a single zero word
        acc ^= E::mul64(words[i] ^ keys[i], keys[i + 1]);
    }
    acc
}

/// The 128-bit inner hash: XOR of carry-less products of key-offset word
/// pairs. Odd-length inputs behave as if padded with one zero word, so
/// `keys` must hold at least `words.len()` entries rounded up to even.
/// Empty input hashes to 0.
pub fn clnh(words: &[u64], keys: &[u64]) -> u128 {
    assert!(
        words.len() <= BLOCK_KEY_WORDS,
        "block hash takes at most {BLOCK_KEY_WORDS} words, got {}",
        words.len()
    );
    let needed = words.len() + words.len() % 2;
    assert!(
        keys.len() >= needed,
        "block hash over {} words needs {needed} keys, got {}",
        words.len(),
        keys.len()
    );
    #[cfg(target_arch = "x86_64")]
    if crate::clbits::hw_clmul_available() {
        return clnh_backend::<crate::clbits::HardwareBackend>(words, keys);
    }
    clnh_backend::<PortableBackend>(words, keys)
}

/// Reduce a polynomial of degree at most 254 to 128 bits while preserving its
/// value modulo `2^127 + 2 + 1`.
///
/// This is reduction modulo `(2^127 + 2 + 1) ⋆ 2 = 2^128 + 4 + 2`: the high
/// half folds back as `(x ÷ 2^128) ⋆ 4 ⊕ (x ÷ 2^128) ⋆ 2`. When the input
/// degree is exactly 254 that fold carries one bit past position 127, which
/// folds once more as `2^128 ≡ 6`. The result is the exact remainder modulo
/// `2^128 + 4 + 2` and fits in 128 bits.
#[inline]
pub fn lazy_reduce127(x: Poly256) -> u128 {
    debug_assert!(x.degree() <= 254, "lazy reduction needs degree <= 254");
    let carry = if (x.hi >> 126) & 1 == 1 { 6 } else { 0 };
    x.lo ^ (x.hi << 2) ^ (x.hi << 1) ^ carry
}

#[inline(always)]
fn poly_step_backend<E: ClmulBackend>(acc: u128, block_hash: u128, poly_key: u128) -> u128 {
    lazy_reduce127(clmul128_backend::<E>(poly_key, acc)) ^ block_hash
}

/// One Horner step of the block-combining polynomial:
/// `lazy_reduce127(poly_key ⋆ acc) ⊕ block_hash`.
///
/// Requires `degree(poly_key) <= 126` (keys derived or loaded through
/// [`ClKey`] always satisfy this).
pub fn poly_step(acc: u128, block_hash: u128, poly_key: u128) -> u128 {
    debug_assert!(poly_key < (1u128 << 127));
    #[cfg(target_arch = "x86_64")]
    if crate::clbits::hw_clmul_available() {
        return poly_step_backend::<crate::clbits::HardwareBackend>(acc, block_hash, poly_key);
    }
    poly_step_backend::<PortableBackend>(acc, block_hash, poly_key)
}

/// The multiply–xorshift finalizer: a bijection on 64-bit values, so it
/// never introduces collisions; it exists to pass avalanche-style tests
/// that the raw hash's linearity fails.
#[inline]
pub fn finalize_mix(mut x: u64) -> u64 {
    x ^= x >> 33;
    x = x.wrapping_mul(0xFF51_AFD7_ED55_8CCD);
    x ^= x >> 33;
    x = x.wrapping_mul(0xC4CE_B9FE_1A85_EC53);
    x ^= x >> 33;
    x
}

#[inline(always)]
pub(crate) fn clnh_full_block<E: ClmulBackend>(bytes: &[u8], keys: &[u64; BLOCK_KEY_WORDS]) -> u128 {
    // Long-path blocks are zero-padded to the full 128 words, so key-only
    // pairs past the data still contribute.
    let mut words = [0u64; BLOCK_KEY_WORDS];
    pack_words_le(bytes, &mut words);
    clnh_backend::<E>(&words, keys)
}

#[inline(always)]
fn short_path<E: ClmulBackend>(key: &ClKey, message: &[u8]) -> u64 {
    let mut words = [0u64; BLOCK_KEY_WORDS];
    let n = pack_words_le(message, &mut words);
    let inner = clnh_backend::<E>(&words[..n], &key.block_keys);
    let length_term = E::mul64(key.length_key, message.len() as u64);
    reduce128_backend::<E>(inner ^ length_term)
}

#[inline(always)]
pub(crate) fn long_path_finish<E: ClmulBackend>(key: &ClKey, acc: u128, total_len: u64) -> u64 {
    let (k1, k2) = key.final_key_words();
    let (o1, o2) = (acc as u64, (acc >> 64) as u64);
    let compressed = E::mul64(o1 ^ k1, o2 ^ k2);
    let length_term = E::mul64(key.length_key, total_len);
    reduce128_backend::<E>(compressed ^ length_term)
}

#[inline(always)]
fn clhash_backend<E: ClmulBackend>(key: &ClKey, message: &[u8], config: HashConfig) -> u64 {
    let h = if message.len() <= SHORT_INPUT_THRESHOLD {
        short_path::<E>(key, message)
    } else {
        let mut acc = 0u128;
        let mut first = true;
        for block in message.chunks(BLOCK_BYTES) {
            let a = clnh_full_block::<E>(block, &key.block_keys);
            if first {
                acc = a;
                first = false;
            } else {
                acc = poly_step_backend::<E>(acc, a, key.poly_key);
            }
        }
        long_path_finish::<E>(key, acc, message.len() as u64)
    };
    if config.finalize {
        finalize_mix(h)
    } else {
        h
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "pclmulqdq")]
unsafe fn clhash_hw(key: &ClKey, message: &[u8], config: HashConfig) -> u64 {
    clhash_backend::<crate::clbits::HardwareBackend>(key, message, config)
}

/// Hash a message. Dispatches to the hardware carry-less multiply when the
/// CPU has it; the portable path produces bit-identical results.
pub fn clhash(key: &ClKey, message: &[u8], config: HashConfig) -> u64 {
    #[cfg(target_arch = "x86_64")]
    if crate::clbits::hw_clmul_available() {
        // Safety: availability was just checked.
        return unsafe { clhash_hw(key, message, config) };
    }
    clhash_backend::<PortableBackend>(key, message, config)
}

/// Hash with the portable multiplier regardless of CPU support; used for
/// path-parity checks and benchmarking the software fallback.
pub fn clhash_portable(key: &ClKey, message: &[u8], config: HashConfig) -> u64 {
    clhash_backend::<PortableBackend>(key, message, config)
}
