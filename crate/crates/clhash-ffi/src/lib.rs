//! C ABI over the hashing library.
//!
//! Keys and streams cross the boundary as opaque heap pointers created and
//! destroyed here; every function returns a [`ClhStatus`] and writes results
//! through out-pointers. The matching declarations live in
//! `include/clhash.h`, which is maintained by hand against this file.
//!
//! Null pointers are reported as [`ClhStatus::NullArgument`] rather than
//! dereferenced, but the usual FFI caveats apply: pointers must be valid
//! for their stated lengths, and handles must not be used after free.

use clhash::{ClKey, HashConfig, StreamState};

/// Result of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClhStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Key bytes were rejected (length, magic, or key invariants).
    InvalidKey = 2,
    /// A destination buffer was too small.
    BufferTooSmall = 3,
    /// The stream was already finished.
    StreamFinished = 4,
}

/// Opaque key handle.
pub struct ClhKey {
    inner: ClKey,
}

/// Opaque streaming-hash handle; `finished` flips once the digest is taken.
pub struct ClhStream {
    inner: Option<StreamState>,
    key: ClKey,
    finalize: bool,
}

/// Size of a serialized key, including the 4-byte magic.
pub const CLH_KEY_FILE_BYTES: usize = clhash::key::KEY_FILE_BYTES;

/// Whether a hardware carry-less multiply is available on this CPU.
#[no_mangle]
pub extern "C" fn clh_hw_clmul_available() -> bool {
    clhash::hw_clmul_available()
}

/// Number of bytes `clh_key_serialize` writes.
#[no_mangle]
pub extern "C" fn clh_key_serialized_size() -> usize {
    CLH_KEY_FILE_BYTES
}

/// Derive a key from a seed. The returned handle must be released with
/// `clh_key_free`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn clh_key_from_seed(seed: u64, out: *mut *mut ClhKey) -> ClhStatus {
    if out.is_null() {
        return ClhStatus::NullArgument;
    }
    let handle = Box::new(ClhKey {
        inner: ClKey::derive(seed),
    });
    *out = Box::into_raw(handle);
    ClhStatus::Ok
}

/// Parse a serialized key (the `CLH1` format, `clh_key_serialized_size()`
/// bytes). The returned handle must be released with `clh_key_free`.
///
/// # Safety
/// `bytes` must be readable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn clh_key_from_bytes(
    bytes: *const u8,
    len: usize,
    out: *mut *mut ClhKey,
) -> ClhStatus {
    if bytes.is_null() || out.is_null() {
        return ClhStatus::NullArgument;
    }
    let slice = std::slice::from_raw_parts(bytes, len);
    match ClKey::from_bytes(slice) {
        Ok(key) => {
            *out = Box::into_raw(Box::new(ClhKey { inner: key }));
            ClhStatus::Ok
        }
        Err(_) => ClhStatus::InvalidKey,
    }
}

/// Write the serialized form of `key` into `buf`.
///
/// # Safety
/// `buf` must be writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn clh_key_serialize(
    key: *const ClhKey,
    buf: *mut u8,
    len: usize,
) -> ClhStatus {
    if key.is_null() || buf.is_null() {
        return ClhStatus::NullArgument;
    }
    if len < CLH_KEY_FILE_BYTES {
        return ClhStatus::BufferTooSmall;
    }
    let bytes = (*key).inner.to_bytes();
    std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
    ClhStatus::Ok
}

/// Release a key handle. Null is a no-op.
///
/// # Safety
/// `key` must have come from this library and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn clh_key_free(key: *mut ClhKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// One-shot hash of `len` bytes at `msg`. `msg` may be null only when
/// `len == 0`.
///
/// # Safety
/// `msg` must be readable for `len` bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn clh_hash(
    key: *const ClhKey,
    msg: *const u8,
    len: usize,
    finalize: bool,
    out: *mut u64,
) -> ClhStatus {
    if key.is_null() || out.is_null() || (msg.is_null() && len != 0) {
        return ClhStatus::NullArgument;
    }
    let data: &[u8] = if len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(msg, len)
    };
    *out = clhash::clhash(&(*key).inner, data, HashConfig { finalize });
    ClhStatus::Ok
}

/// Create a streaming hasher over a copy of `key`. Release with
/// `clh_stream_free` (also after `clh_stream_finish`).
///
/// # Safety
/// `key` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn clh_stream_new(
    key: *const ClhKey,
    finalize: bool,
    out: *mut *mut ClhStream,
) -> ClhStatus {
    if key.is_null() || out.is_null() {
        return ClhStatus::NullArgument;
    }
    let key = (*key).inner.clone();
    let handle = Box::new(ClhStream {
        inner: Some(StreamState::new(&key, HashConfig { finalize })),
        key,
        finalize,
    });
    *out = Box::into_raw(handle);
    ClhStatus::Ok
}

/// Absorb `len` bytes. Fails with `StreamFinished` after the digest was
/// taken. `bytes` may be null only when `len == 0`.
///
/// # Safety
/// `stream` must be a live handle; `bytes` readable for `len` when non-null.
#[no_mangle]
pub unsafe extern "C" fn clh_stream_update(
    stream: *mut ClhStream,
    bytes: *const u8,
    len: usize,
) -> ClhStatus {
    if stream.is_null() || (bytes.is_null() && len != 0) {
        return ClhStatus::NullArgument;
    }
    let state = match (*stream).inner.as_mut() {
        Some(s) => s,
        None => return ClhStatus::StreamFinished,
    };
    if len != 0 {
        state.update(std::slice::from_raw_parts(bytes, len));
    }
    ClhStatus::Ok
}

/// Take the digest; equals the one-shot hash of everything absorbed. The
/// handle stays allocated (free it with `clh_stream_free`) but rejects
/// further use with `StreamFinished`.
///
/// # Safety
/// `stream` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn clh_stream_finish(stream: *mut ClhStream, out: *mut u64) -> ClhStatus {
    if stream.is_null() || out.is_null() {
        return ClhStatus::NullArgument;
    }
    match (*stream).inner.take() {
        Some(state) => {
            *out = state.finish();
            ClhStatus::Ok
        }
        None => ClhStatus::StreamFinished,
    }
}

/// Reset a stream to empty so the handle can hash another message with the
/// same key and settings.
///
/// # Safety
/// `stream` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn clh_stream_reset(stream: *mut ClhStream) -> ClhStatus {
    if stream.is_null() {
        return ClhStatus::NullArgument;
    }
    let s = &mut *stream;
    s.inner = Some(StreamState::new(
        &s.key,
        HashConfig {
            finalize: s.finalize,
        },
    ));
    ClhStatus::Ok
}

/// Release a stream handle. Null is a no-op.
///
/// # Safety
/// `stream` must have come from this library and not already be freed.
#[no_mangle]
pub unsafe extern "C" fn clh_stream_free(stream: *mut ClhStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}
