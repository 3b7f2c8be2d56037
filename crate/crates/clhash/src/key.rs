//! Key material: the family member picked by a seed, and its on-disk format.
//!
//! A key is 1064 bytes of pseudorandom material: 128 block words for the
//! inner word-pair hashing, a 126-bit polynomial coefficient for combining
//! blocks, a 128-bit pair for the final compression step, and one 64-bit
//! word for length mixing. Expansion from a 64-bit seed is pinned to
//! SplitMix64 so that a seed names the same key everywhere.

use std::path::Path;

/// SplitMix64: the fixed seed-expansion generator for key derivation, also
/// used wherever tests and tools need cheap deterministic randomness.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_u128(&mut self) -> u128 {
        // little end first
        let lo = self.next_u64() as u128;
        let hi = self.next_u64() as u128;
        lo | (hi << 64)
    }

    pub fn fill_bytes(&mut self, buf: &mut [u8]) {
        for chunk in buf.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}

/// Number of 64-bit block keys (one 1024-byte block's worth of word pairs).
pub const BLOCK_KEY_WORDS: usize = 128;

/// Raw key material size in bytes: 128·8 + 16 + 16 + 8.
pub const KEY_BYTES: usize = BLOCK_KEY_WORDS * 8 + 16 + 16 + 8;

/// Magic prefix of the key file format.
pub const KEY_FILE_MAGIC: [u8; 4] = *b"CLH1";

/// Serialized key file size: magic plus key material.
pub const KEY_FILE_BYTES: usize = 4 + KEY_BYTES;

const POLY_KEY_MASK: u128 = (1u128 << 126) - 1;

/// One member of the hash family.
#[derive(Clone, PartialEq, Eq)]
pub struct ClKey {
    /// Word keys for the inner block hash, consumed in pairs.
    pub block_keys: [u64; BLOCK_KEY_WORDS],
    /// Coefficient of the block-combining polynomial; top two bits are
    /// always zero so every product stays reducible in 128 bits.
    pub poly_key: u128,
    /// The pair `(k'_1, k'_2)` for the final compression, low word first.
    pub final_key: u128,
    /// Multiplier for the message-length term.
    pub length_key: u64,
}

impl std::fmt::Debug for ClKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // keys are bulky and secret-ish; show the shape only
        f.debug_struct("ClKey")
            .field("block_keys", &format_args!("[u64; {BLOCK_KEY_WORDS}]"))
            .field("poly_key", &format_args!("0x{:032x}", self.poly_key))
            .field("final_key", &format_args!("0x{:032x}", self.final_key))
            .field("length_key", &format_args!("0x{:016x}", self.length_key))
            .finish()
    }
}

/// A key file failed to parse.
#[derive(Debug, thiserror::Error)]
pub enum KeyFileError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes (expected \"CLH1\")")]
    BadMagic,
    #[error("bad key file length: expected {expected} bytes, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("polynomial key has one of its top two bits set")]
    InvalidPolyKey,
}

impl ClKey {
    /// Expand a 64-bit seed into a full key.
    ///
    /// The SplitMix64 stream is consumed in a fixed order: the 128 block
    /// keys, then the polynomial key (two words, low first, top two bits
    /// cleared), then the final-step pair, then the length key. The same
    /// seed therefore yields a bit-identical key on every platform.
    pub fn derive(seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut block_keys = [0u64; BLOCK_KEY_WORDS];
        for k in block_keys.iter_mut() {
            *k = rng.next_u64();
        }
        let poly_key = rng.next_u128() & POLY_KEY_MASK;
        let final_key = rng.next_u128();
        let length_key = rng.next_u64();
        ClKey {
            block_keys,
            poly_key,
            final_key,
            length_key,
        }
    }

    /// The final-step pair `(k'_1, k'_2)`: low and high words of
    /// [`final_key`](Self::final_key).
    pub fn final_key_words(&self) -> (u64, u64) {
        (self.final_key as u64, (self.final_key >> 64) as u64)
    }

    /// Serialize to the `CLH1` key file format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(KEY_FILE_BYTES);
        out.extend_from_slice(&KEY_FILE_MAGIC);
        for k in &self.block_keys {
            out.extend_from_slice(&k.to_le_bytes());
        }
        out.extend_from_slice(&self.poly_key.to_le_bytes());
        out.extend_from_slice(&self.final_key.to_le_bytes());
        out.extend_from_slice(&self.length_key.to_le_bytes());
        debug_assert_eq!(out.len(), KEY_FILE_BYTES);
        out
    }

    /// Parse the `CLH1` key file format.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, KeyFileError> {
        if bytes.len() != KEY_FILE_BYTES {
            return Err(KeyFileError::BadLength {
                expected: KEY_FILE_BYTES,
                got: bytes.len(),
            });
        }
        if bytes[..4] != KEY_FILE_MAGIC {
            return Err(KeyFileError::BadMagic);
        }
        let body = &bytes[4..];
        let mut block_keys = [0u64; BLOCK_KEY_WORDS];
        for (i, k) in block_keys.iter_mut().enumerate() {
            *k = u64::from_le_bytes(body[i * 8..i * 8 + 8].try_into().unwrap());
        }
        let off = BLOCK_KEY_WORDS * 8;
        let poly_key = u128::from_le_bytes(body[off..off + 16].try_into().unwrap());
        if poly_key & !POLY_KEY_MASK != 0 {
            return Err(KeyFileError::InvalidPolyKey);
        }
        let final_key = u128::from_le_bytes(body[off + 16..off + 32].try_into().unwrap());
        let length_key = u64::from_le_bytes(body[off + 32..off + 40].try_into().unwrap());
        Ok(ClKey {
            block_keys,
            poly_key,
            final_key,
            length_key,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), KeyFileError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, KeyFileError> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_first_output_for_seed_zero() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn derivation_is_deterministic() {
        let a = ClKey::derive(0xDEAD_BEEF);
        let b = ClKey::derive(0xDEAD_BEEF);
        assert_eq!(a, b);
        assert_ne!(a, ClKey::derive(0xDEAD_BEF0));
    }

    #[test]
    fn first_block_key_comes_straight_from_the_stream() {
        let key = ClKey::derive(0);
        assert_eq!(key.block_keys[0], 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn poly_key_top_bits_are_clear() {
        for seed in 0..64u64 {
            let key = ClKey::derive(seed);
            assert!(key.poly_key < (1u128 << 126));
        }
    }

    #[test]
    fn byte_roundtrip_preserves_key() {
        let key = ClKey::derive(7);
        let bytes = key.to_bytes();
        assert_eq!(bytes.len(), KEY_FILE_BYTES);
        assert_eq!(bytes.len(), 1068);
        let back = ClKey::from_bytes(&bytes).unwrap();
        assert_eq!(key, back);
    }

    #[test]
    fn rejects_bad_magic() {
        let mut bytes = ClKey::derive(7).to_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            ClKey::from_bytes(&bytes),
            Err(KeyFileError::BadMagic)
        ));
    }

    #[test]
    fn rejects_bad_length() {
        let bytes = ClKey::derive(7).to_bytes();
        assert!(matches!(
            ClKey::from_bytes(&bytes[..bytes.len() - 1]),
            Err(KeyFileError::BadLength { .. })
        ));
    }

    #[test]
    fn rejects_poly_key_with_top_bits_set() {
        let mut bytes = ClKey::derive(7).to_bytes();
        // byte 15 of the poly_key field, counted from the end of block keys
        let poly_hi = 4 + BLOCK_KEY_WORDS * 8 + 15;
        bytes[poly_hi] |= 0x80;
        assert!(matches!(
            ClKey::from_bytes(&bytes),
            Err(KeyFileError::InvalidPolyKey)
        ));
        let mut bytes2 = ClKey::derive(7).to_bytes();
        bytes2[poly_hi] |= 0x40;
        assert!(matches!(
            ClKey::from_bytes(&bytes2),
            Err(KeyFileError::InvalidPolyKey)
        ));
    }
}
