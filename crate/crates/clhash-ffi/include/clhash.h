/* C interface to the clhash library (crates/clhash-ffi).
 *
 * Keys and streams are opaque handles; every call returns a ClhStatus and
 * writes results through out-pointers. Handles must be released with the
 * matching *_free function. This header is maintained by hand against
 * crates/clhash-ffi/src/lib.rs; keep the two in sync.
 *
 * Link against the clhash_ffi static or shared library produced by
 * `cargo build -p clhash-ffi --release`.
 */

#ifndef CLHASH_H
#define CLHASH_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Result of every call. */
typedef enum ClhStatus {
  /* Success. */
  CLH_STATUS_OK = 0,
  /* A required pointer argument was null. */
  CLH_STATUS_NULL_ARGUMENT = 1,
  /* Key bytes were rejected (length, magic, or key invariants). */
  CLH_STATUS_INVALID_KEY = 2,
  /* A destination buffer was too small. */
  CLH_STATUS_BUFFER_TOO_SMALL = 3,
  /* The stream was already finished. */
  CLH_STATUS_STREAM_FINISHED = 4,
} ClhStatus;

/* Opaque key handle. */
typedef struct ClhKey ClhKey;

/* Opaque streaming-hash handle. */
typedef struct ClhStream ClhStream;

/* Size in bytes of a serialized key ("CLH1" magic plus 1064 key bytes). */
#define CLH_KEY_FILE_BYTES 1068

/* Whether a hardware carry-less multiply is available on this CPU. */
bool clh_hw_clmul_available(void);

/* Number of bytes clh_key_serialize writes (== CLH_KEY_FILE_BYTES). */
size_t clh_key_serialized_size(void);

/* Derive a key from a seed. The handle must be released with clh_key_free. */
ClhStatus clh_key_from_seed(uint64_t seed, ClhKey **out);

/* Parse a serialized key (the CLH1 format, clh_key_serialized_size() bytes).
 * The handle must be released with clh_key_free. */
ClhStatus clh_key_from_bytes(const uint8_t *bytes, size_t len, ClhKey **out);

/* Write the serialized form of key into buf (len >= CLH_KEY_FILE_BYTES). */
ClhStatus clh_key_serialize(const ClhKey *key, uint8_t *buf, size_t len);

/* Release a key handle. Null is a no-op. */
void clh_key_free(ClhKey *key);

/* One-shot hash of len bytes at msg; msg may be null only when len == 0.
 * Set finalize to run the bit-mixing finalizer over the 64-bit result. */
ClhStatus clh_hash(const ClhKey *key, const uint8_t *msg, size_t len,
                   bool finalize, uint64_t *out);

/* Create a streaming hasher over a copy of key. Release with
 * clh_stream_free, also after clh_stream_finish. */
ClhStatus clh_stream_new(const ClhKey *key, bool finalize, ClhStream **out);

/* Absorb len bytes; bytes may be null only when len == 0. Returns
 * CLH_STATUS_STREAM_FINISHED once the digest has been taken. */
ClhStatus clh_stream_update(ClhStream *stream, const uint8_t *bytes,
                            size_t len);

/* Take the digest; bit-identical to the one-shot hash of everything
 * absorbed. Further updates fail until clh_stream_reset. */
ClhStatus clh_stream_finish(ClhStream *stream, uint64_t *out);

/* Reset a stream to empty, keeping its key and settings. */
ClhStatus clh_stream_reset(ClhStream *stream);

/* Release a stream handle. Null is a no-op. */
void clh_stream_free(ClhStream *stream);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CLHASH_H */
