//! A 64-bit almost-XOR-universal hash family built on carry-less
//! multiplication over binary finite fields, together with the slow
//! arithmetic oracle it is validated against, a statistical test suite, and
//! a throughput benchmark harness.
//!
//! The interesting parts, bottom to top:
//!
//! * [`clbits`] — carry-less multiplication (portable and hardware),
//!   polynomial degree, Euclidean division, irreducibility.
//! * [`gf64`] — the field GF(2^64) modulo `2^64 ⊕ 27`, with the
//!   one-multiplication reduction and its 16-byte fold table.
//! * [`key`] / [`hash`] / [`stream`] — key schedule, the hash itself, and
//!   the incremental interface.
//! * [`oracle`] — bit-at-a-time reference implementations used as referees.
//! * [`stats`] — avalanche, sparse-input collision sweeps, and empirical
//!   universality gates.
//! * [`bench`] — wall-clock (and, on x86-64, cycle-count) throughput
//!   measurement with CSV output.
//! * [`verify`] — the self-test battery behind `clhash verify`.
//!
//! Keyed hashing is two calls:
//!
//! ```
//! use clhash::{ClKey, HashConfig};
//!
//! let key = ClKey::derive(42);
//! let h = clhash::clhash(&key, b"some message", HashConfig::raw());
//! assert_eq!(h, clhash::clhash(&key, b"some message", HashConfig::raw()));
//! ```

pub mod bench;
pub mod clbits;
pub mod gf64;
pub mod hash;
pub mod key;
pub mod oracle;
pub mod stats;
pub mod stream;
pub mod verify;

pub use clbits::{cl_divmod, clmul128, clmul64, hw_clmul_available, DivMod, Poly256};
pub use gf64::{gf64_mul, gf64_pow, reduce128};
pub use hash::{clhash, clhash_portable, clnh, finalize_mix, HashConfig};
pub use key::{ClKey, KeyFileError, SplitMix64};
pub use stream::StreamState;
