//! Incremental hashing with the same output as the one-shot function.
//!
//! Bytes are buffered until a full 1024-byte block is known not to be the
//! last one, at which point it is folded into the polynomial accumulator.
//! Deferring the flush this way keeps the short-input path available when
//! the whole message turns out to fit one block, so a stream finishes to a
//! value bit-identical to hashing the concatenated bytes at once.

use crate::clbits::PortableBackend;
use crate::hash::{clnh_full_block, long_path_finish, poly_step, HashConfig, BLOCK_BYTES};
use crate::key::ClKey;

/// Incremental hasher state. Obtain with [`StreamState::new`], feed with
/// [`update`](StreamState::update), and consume with
/// [`finish`](StreamState::finish); the consuming finish makes use-after-
/// finish unrepresentable. The state may move between threads between calls.
#[derive(Clone)]
pub struct StreamState {
    key: ClKey,
    config: HashConfig,
    poly_acc: u128,
    block_count: u64,
    total_len: u64,
    pending_len: usize,
    pending: Box<[u8; BLOCK_BYTES]>,
}

impl StreamState {
    pub fn new(key: &ClKey, config: HashConfig) -> Self {
        StreamState {
            key: key.clone(),
            config,
            poly_acc: 0,
            block_count: 0,
            total_len: 0,
            pending_len: 0,
            pending: Box::new([0u8; BLOCK_BYTES]),
        }
    }

    /// Absorb more message bytes; any byte counts are fine, including zero.
    pub fn update(&mut self, mut bytes: &[u8]) {
        while !bytes.is_empty() {
            if self.pending_len == BLOCK_BYTES {
                // more input follows, so the buffered block is not the last
                self.flush_block();
            }
            let take = (BLOCK_BYTES - self.pending_len).min(bytes.len());
            self.pending[self.pending_len..self.pending_len + take]
                .copy_from_slice(&bytes[..take]);
            self.pending_len += take;
            self.total_len += take as u64;
            bytes = &bytes[take..];
        }
    }

    fn flush_block(&mut self) {
        let a = self.clnh_block(&self.pending[..self.pending_len]);
        self.poly_acc = if self.block_count == 0 {
            a
        } else {
            poly_step(self.poly_acc, a, self.key.poly_key)
        };
        self.block_count += 1;
        self.pending_len = 0;
    }

    fn clnh_block(&self, bytes: &[u8]) -> u128 {
        #[cfg(target_arch = "x86_64")]
        if crate::clbits::hw_clmul_available() {
            return clnh_full_block::<crate::clbits::HardwareBackend>(bytes, &self.key.block_keys);
        }
        clnh_full_block::<PortableBackend>(bytes, &self.key.block_keys)
    }

    /// The hash of everything absorbed so far, without consuming the state.
    fn current_hash(&self) -> u64 {
        let h = if self.total_len <= BLOCK_BYTES as u64 {
            // the whole message is still buffered
            crate::hash::clhash(
                &self.key,
                &self.pending[..self.pending_len],
                HashConfig::raw(),
            )
        } else {
            debug_assert!(self.block_count >= 1 && self.pending_len > 0);
            let last = self.clnh_block(&self.pending[..self.pending_len]);
            let acc = poly_step(self.poly_acc, last, self.key.poly_key);
            self.long_finish(acc)
        };
        if self.config.finalize {
            crate::hash::finalize_mix(h)
        } else {
            h
        }
    }

    fn long_finish(&self, acc: u128) -> u64 {
        #[cfg(target_arch = "x86_64")]
        if crate::clbits::hw_clmul_available() {
            return long_path_finish::<crate::clbits::HardwareBackend>(
                &self.key,
                acc,
                self.total_len,
            );
        }
        long_path_finish::<PortableBackend>(&self.key, acc, self.total_len)
    }

    /// Finish the stream. Equals the one-shot hash of the concatenation of
    /// every `update` call, bit for bit.
    pub fn finish(self) -> u64 {
        self.current_hash()
    }

    /// Total bytes absorbed so far.
    pub fn len(&self) -> u64 {
        self.total_len
    }

    pub fn is_empty(&self) -> bool {
        self.total_len == 0
    }
}

impl std::fmt::Debug for StreamState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StreamState")
            .field("total_len", &self.total_len)
            .field("block_count", &self.block_count)
            .field("pending_len", &self.pending_len)
            .field("finalize", &self.config.finalize)
            .finish()
    }
}

/// `std::hash::Hasher` adapter: `write` feeds the stream, `finish` reports
/// the current hash without consuming it.
impl std::hash::Hasher for StreamState {
    fn finish(&self) -> u64 {
        self.current_hash()
    }

    fn write(&mut self, bytes: &[u8]) {
        self.update(bytes);
    }
}
