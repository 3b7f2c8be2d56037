//! Carry-less arithmetic over GF(2)[x].
//!
//! Integers are read as binary polynomials: bit `i` is the coefficient of
//! `x^i`. Multiplication XORs partial products instead of adding them, so
//! there are no carries. This module provides the multiplication primitives
//! (portable and, on x86-64, hardware-accelerated), polynomial degree, the
//! Euclidean-style division that everything else is validated against, and an
//! irreducibility check for moduli.
//!
//! All functions here are pure; none of them is constant-time.

use std::fmt;

/// A binary polynomial of degree at most 255, split into two 128-bit halves.
///
/// Products of two 128-bit polynomials and the dividends handed to
/// [`cl_divmod`] live here; everything narrower uses plain `u64`/`u128`.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct Poly256 {
    pub hi: u128,
    pub lo: u128,
}

impl Poly256 {
    pub const ZERO: Poly256 = Poly256 { hi: 0, lo: 0 };

    pub const fn new(hi: u128, lo: u128) -> Self {
        Poly256 { hi, lo }
    }

    pub const fn is_zero(&self) -> bool {
        self.hi == 0 && self.lo == 0
    }

    /// Index of the most significant set bit, or -1 for the zero polynomial.
    pub const fn degree(&self) -> i32 {
        if self.hi != 0 {
            255 - self.hi.leading_zeros() as i32
        } else {
            degree128(self.lo)
        }
    }

    /// Left shift by `k` bits (`k < 256`); bits pushed past position 255 are
    /// discarded.
    pub const fn shl(self, k: u32) -> Self {
        if k == 0 {
            self
        } else if k < 128 {
            Poly256 {
                hi: (self.hi << k) | (self.lo >> (128 - k)),
                lo: self.lo << k,
            }
        } else if k < 256 {
            Poly256 {
                hi: self.lo << (k - 128),
                lo: 0,
            }
        } else {
            Poly256::ZERO
        }
    }

    const fn set_bit(self, i: u32) -> Self {
        if i < 128 {
            Poly256 {
                hi: self.hi,
                lo: self.lo | (1u128 << i),
            }
        } else {
            Poly256 {
                hi: self.hi | (1u128 << (i - 128)),
                lo: self.lo,
            }
        }
    }

    /// Low 128 bits; panics if the high half is nonzero.
    pub fn expect_u128(self) -> u128 {
        assert_eq!(self.hi, 0, "polynomial does not fit in 128 bits");
        self.lo
    }
}

impl From<u64> for Poly256 {
    fn from(v: u64) -> Self {
        Poly256 { hi: 0, lo: v as u128 }
    }
}

impl From<u128> for Poly256 {
    fn from(v: u128) -> Self {
        Poly256 { hi: 0, lo: v }
    }
}

impl std::ops::BitXor for Poly256 {
    type Output = Poly256;
    fn bitxor(self, rhs: Poly256) -> Poly256 {
        Poly256 {
            hi: self.hi ^ rhs.hi,
            lo: self.lo ^ rhs.lo,
        }
    }
}

impl std::ops::BitXorAssign for Poly256 {
    fn bitxor_assign(&mut self, rhs: Poly256) {
        self.hi ^= rhs.hi;
        self.lo ^= rhs.lo;
    }
}

impl fmt::Debug for Poly256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly256(0x{:032x}{:032x})", self.hi, self.lo)
    }
}

/// Quotient/remainder pair from carry-less division: `a = quotient ⋆ b ⊕
/// remainder` with `degree(remainder) < degree(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivMod {
    pub quotient: Poly256,
    pub remainder: Poly256,
}

/// Attempted carry-less division by the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("carry-less division by zero")]
pub struct DivideByZero;

/// Degree of a 64-bit polynomial: index of the most significant set bit,
/// with `degree(0) = -1` so loop guards on shrinking remainders terminate.
pub const fn degree64(x: u64) -> i32 {
    if x == 0 {
        -1
    } else {
        63 - x.leading_zeros() as i32
    }
}

/// Degree of a 128-bit polynomial; `degree(0) = -1`.
pub const fn degree128(x: u128) -> i32 {
    if x == 0 {
        -1
    } else {
        127 - x.leading_zeros() as i32
    }
}

/// Carry-less product of two 64-bit polynomials, using the hardware
/// instruction when the CPU has one and the portable path otherwise.
#[inline]
pub fn clmul64(a: u64, b: u64) -> u128 {
    #[cfg(target_arch = "x86_64")]
    if hw_clmul_available() {
        // Safety: availability was just checked.
        return unsafe { pclmul::clmul64(a, b) };
    }
    clmul64_portable(a, b)
}

/// Portable carry-less multiply: 4-bit windows of `a` against precomputed
/// multiples of `b`, accumulated with shifts and XORs. Bit-exact with the
/// hardware path.
#[inline]
pub fn clmul64_portable(a: u64, b: u64) -> u128 {
    let b = b as u128;
    // table[w] = w ⋆ b for each 4-bit w
    let mut table = [0u128; 16];
    for (w, slot) in table.iter_mut().enumerate().skip(1) {
        let mut t = 0u128;
        if w & 1 != 0 {
            t ^= b;
        }
        if w & 2 != 0 {
            t ^= b << 1;
        }
        if w & 4 != 0 {
            t ^= b << 2;
        }
        if w & 8 != 0 {
            t ^= b << 3;
        }
        *slot = t;
    }
    let mut acc = 0u128;
    for i in (0..16).rev() {
        acc = (acc << 4) ^ table[((a >> (4 * i)) & 0xf) as usize];
    }
    acc
}

/// Whether a hardware carry-less multiply instruction is available.
pub fn hw_clmul_available() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        std::arch::is_x86_feature_detected!("pclmulqdq")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

/// Hardware carry-less multiply, or `None` when the CPU lacks the
/// instruction. The dispatching [`clmul64`] is what callers normally want;
/// this exists so the two paths can be compared directly.
pub fn clmul64_hw(a: u64, b: u64) -> Option<u128> {
    #[cfg(target_arch = "x86_64")]
    if hw_clmul_available() {
        // Safety: availability was just checked.
        return Some(unsafe { pclmul::clmul64(a, b) });
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        let _ = (a, b);
    }
    None
}

#[cfg(target_arch = "x86_64")]
pub(crate) mod pclmul {
    #[cfg(target_arch = "x86_64")]
    use core::arch::x86_64::*;

    /// Safety: requires the `pclmulqdq` CPU feature.
    #[inline]
    #[target_feature(enable = "pclmulqdq")]
    pub(crate) unsafe fn clmul64(a: u64, b: u64) -> u128 {
        let va = _mm_set_epi64x(0, a as i64);
        let vb = _mm_set_epi64x(0, b as i64);
        let prod = _mm_clmulepi64_si128::<0x00>(va, vb);
        let mut out = [0u64; 2];
        _mm_storeu_si128(out.as_mut_ptr() as *mut __m128i, prod);
        (out[0] as u128) | ((out[1] as u128) << 64)
    }
}

/// Strategy for the 64-bit carry-less multiply inside the hashing kernels.
///
/// The hash path is monomorphized over this so the hardware build carries no
/// per-multiplication dispatch.
pub(crate) trait ClmulBackend: Copy {
    fn mul64(a: u64, b: u64) -> u128;
}

#[derive(Clone, Copy)]
pub(crate) struct PortableBackend;

impl ClmulBackend for PortableBackend {
    #[inline(always)]
    fn mul64(a: u64, b: u64) -> u128 {
        clmul64_portable(a, b)
    }
}

/// Invariant: only instantiate on a path guarded by [`hw_clmul_available`].
#[cfg(target_arch = "x86_64")]
#[derive(Clone, Copy)]
pub(crate) struct HardwareBackend;

#[cfg(target_arch = "x86_64")]
impl ClmulBackend for HardwareBackend {
    #[inline(always)]
    fn mul64(a: u64, b: u64) -> u128 {
        // Safety: callers uphold the availability invariant above.
        unsafe { pclmul::clmul64(a, b) }
    }
}

#[inline(always)]
pub(crate) fn clmul128_backend<E: ClmulBackend>(a: u128, b: u128) -> Poly256 {
    // Schoolbook over 64-bit halves: four multiplications plus shifts/XORs.
    let (a0, a1) = (a as u64, (a >> 64) as u64);
    let (b0, b1) = (b as u64, (b >> 64) as u64);
    let ll = E::mul64(a0, b0);
    let hh = E::mul64(a1, b1);
    let mid = E::mul64(a0, b1) ^ E::mul64(a1, b0);
    Poly256 {
        hi: hh ^ (mid >> 64),
        lo: ll ^ (mid << 64),
    }
}

/// Carry-less product of two 128-bit polynomials as a 256-bit polynomial.
pub fn clmul128(a: u128, b: u128) -> Poly256 {
    #[cfg(target_arch = "x86_64")]
    if hw_clmul_available() {
        return clmul128_backend::<HardwareBackend>(a, b);
    }
    clmul128_backend::<PortableBackend>(a, b)
}

/// Carry-less Euclidean division: repeatedly cancel the leading bit of the
/// running remainder with a shifted copy of the divisor.
///
/// Returns `(quotient, remainder)` with `a = quotient ⋆ b ⊕ remainder` and
/// `degree(remainder) < degree(b)`. This is the slow, obviously-correct
/// reference that the fast reductions are checked against.
pub fn cl_divmod(a: Poly256, b: Poly256) -> Result<DivMod, DivideByZero> {
    if b.is_zero() {
        return Err(DivideByZero);
    }
    let db = b.degree();
    let mut quotient = Poly256::ZERO;
    let mut remainder = a;
    while remainder.degree() >= db {
        let shift = (remainder.degree() - db) as u32;
        quotient = quotient.set_bit(shift);
        remainder ^= b.shl(shift);
    }
    Ok(DivMod { quotient, remainder })
}

/// Remainder of a 128-bit-or-narrower modulus; convenience over [`cl_divmod`].
pub fn cl_rem(a: Poly256, b: u128) -> u128 {
    cl_divmod(a, Poly256::from(b))
        .expect("modulus must be nonzero")
        .remainder
        .expect_u128()
}

/// Carry-less polynomial GCD via the Euclidean algorithm.
fn cl_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = cl_rem(Poly256::from(a), b);
        a = b;
        b = r;
    }
    a
}

/// Square `a` modulo `p` in the carry-less ring.
fn cl_square_mod(a: u128, p: u128) -> u128 {
    cl_rem(clmul128(a, a), p)
}

/// Whether `p` (degree 1..=127) has no nontrivial carry-less divisor.
///
/// Uses the squaring-based criterion: `p` of degree `d` is irreducible iff
/// `x^(2^d) ≡ x (mod p)` and `gcd(x^(2^(d/q)) ⊕ x, p) = 1` for every prime
/// `q` dividing `d`.
pub fn is_irreducible(p: u128) -> bool {
    let d = degree128(p);
    assert!(d >= 1, "irreducibility is defined for degree >= 1");
    if d == 1 {
        return true;
    }
    if p & 1 == 0 {
        // divisible by x
        return false;
    }
    let d = d as u32;
    let checkpoints: Vec<u32> = prime_factors(d).into_iter().map(|q| d / q).collect();
    let x = 2u128;
    let mut pow = x; // x^(2^0)
    for j in 1..=d {
        pow = cl_square_mod(pow, p);
        if checkpoints.contains(&j) && cl_gcd(pow ^ x, p) != 1 {
            return false;
        }
    }
    pow == x
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{clmul128_bitloop, clmul64_bitloop};
    use crate::SplitMix64;
    use proptest::prelude::*;

    #[test]
    fn clmul64_small_products() {
        assert_eq!(clmul64(2, 3), 6); // x·(x+1) = x²+x
        assert_eq!(clmul64(3, 3), 5); // (x+1)² = x²+1, no cross carry
        assert_eq!(clmul64(3, 27), 45);
        assert_eq!(clmul64(1 << 63, 2), 1u128 << 64);
        assert_eq!(clmul64(0, 0xdead_beef), 0);
        assert_eq!(clmul64(0xdead_beef, 0), 0);
    }

    #[test]
    fn clmul128_identity_and_degree() {
        let a = 0x0123_4567_89ab_cdef_fedc_ba98_7654_3210u128;
        assert_eq!(clmul128(a, 1), Poly256::from(a));
        assert_eq!(clmul128(1, a), Poly256::from(a));
        let x64 = 1u128 << 64;
        assert_eq!(clmul128(x64, x64), Poly256::new(1, 0)); // 2^64 ⋆ 2^64 = 2^128
    }

    #[test]
    fn clmul128_agrees_with_clmul64_on_narrow_inputs() {
        let mut rng = SplitMix64::new(0x11);
        for _ in 0..1000 {
            let a = rng.next_u64();
            let b = rng.next_u64();
            assert_eq!(clmul128(a as u128, b as u128), Poly256::from(clmul64(a, b)));
        }
    }

    #[test]
    fn degree_of_powers_and_zero() {
        assert_eq!(degree64(1), 0);
        for j in 0..64 {
            assert_eq!(degree64(1u64 << j), j);
        }
        for j in 0..128 {
            assert_eq!(degree128(1u128 << j), j);
        }
        assert_eq!(degree64(0), -1);
        assert_eq!(degree128(0), -1);
        assert_eq!(Poly256::ZERO.degree(), -1);
        assert_eq!(Poly256::new(1, 0).degree(), 128);
    }

    #[test]
    fn divmod_by_one_is_identity() {
        let a = Poly256::new(0x1234, 0x5678_9abc_def0);
        let dm = cl_divmod(a, Poly256::from(1u64)).unwrap();
        assert_eq!(dm.quotient, a);
        assert_eq!(dm.remainder, Poly256::ZERO);
    }

    #[test]
    fn divmod_rejects_zero_divisor() {
        assert_eq!(
            cl_divmod(Poly256::from(5u64), Poly256::ZERO),
            Err(DivideByZero)
        );
    }

    #[test]
    fn divmod_reduces_shifted_r() {
        // 27 ⋆ 2^64 mod (2^64 ⊕ 27) = 27 ⋆ 27: low bits of p fold straight back.
        let p = Poly256::from((1u128 << 64) | 27);
        let a = clmul128(27, 1u128 << 64);
        let dm = cl_divmod(a, p).unwrap();
        assert_eq!(dm.remainder, Poly256::from(clmul64(27, 27)));
        assert_eq!(dm.remainder, Poly256::from(325u64));
    }

    #[test]
    fn divmod_rederives_reduction_table() {
        let p = Poly256::from((1u128 << 64) | 27);
        let expected: [u8; 16] = [
            0, 27, 54, 45, 108, 119, 90, 65, 216, 195, 238, 245, 180, 175, 130, 153,
        ];
        for (w, &want) in expected.iter().enumerate() {
            let a = clmul128(w as u128, 1u128 << 64);
            let rem = cl_divmod(a, p).unwrap().remainder;
            assert_eq!(rem, Poly256::from(want as u64), "w = {w}");
        }
    }

    #[test]
    fn irreducibility_of_known_polynomials() {
        assert!(is_irreducible(2)); // x
        assert!(is_irreducible(3)); // x + 1
        assert!(!is_irreducible(5)); // x² + 1 = (x+1)²
        assert!(is_irreducible(7)); // x² + x + 1
        assert!(is_irreducible((1u128 << 64) | 27));
        assert!(is_irreducible((1u128 << 127) | 3));
        assert!(!is_irreducible((1u128 << 64) | 26)); // even constant term
    }

    /// Trial division over every candidate divisor of degree <= d/2.
    fn is_irreducible_trial(p: u128) -> bool {
        let d = degree128(p);
        assert!((1..=20).contains(&d));
        for b in 2u128..(1u128 << (d / 2 + 1)) {
            if degree128(b) < 1 || degree128(b) > d / 2 {
                continue;
            }
            if cl_rem(Poly256::from(p), b) == 0 {
                return false;
            }
        }
        true
    }

    #[test]
    fn irreducibility_matches_trial_division_up_to_degree_10() {
        for p in 2u128..(1u128 << 11) {
            if degree128(p) < 1 {
                continue;
            }
            assert_eq!(
                is_irreducible(p),
                is_irreducible_trial(p),
                "disagreement at p = {p:#x}"
            );
        }
    }

    #[test]
    fn portable_and_hardware_paths_agree_on_a_million_inputs() {
        if !hw_clmul_available() {
            return;
        }
        let mut rng = SplitMix64::new(0xC1_0001);
        for _ in 0..1_000_000 {
            let a = rng.next_u64();
            let b = rng.next_u64();
            assert_eq!(clmul64_portable(a, b), clmul64_hw(a, b).unwrap());
        }
    }

    proptest! {
        #[test]
        fn clmul64_matches_bitloop_oracle(a: u64, b: u64) {
            prop_assert_eq!(clmul64_portable(a, b), clmul64_bitloop(a, b));
            prop_assert_eq!(clmul64(a, b), clmul64_bitloop(a, b));
        }

        #[test]
        fn clmul128_matches_bitloop_oracle(a: u128, b: u128) {
            prop_assert_eq!(clmul128(a, b), clmul128_bitloop(a, b));
        }

        #[test]
        fn clmul_is_commutative(a: u64, b: u64) {
            prop_assert_eq!(clmul64(a, b), clmul64(b, a));
        }

        #[test]
        fn clmul_is_associative(a: u64, b: u64, c: u64) {
            let left = clmul128(clmul64(a, b), c as u128);
            let right = clmul128(a as u128, clmul64(b, c));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn clmul_distributes_over_xor(a: u64, b: u64, c: u64) {
            prop_assert_eq!(clmul64(a, b ^ c), clmul64(a, b) ^ clmul64(a, c));
        }

        #[test]
        fn degree_is_additive_for_nonzero_factors(a in 1u64.., b in 1u64..) {
            let prod = clmul64(a, b);
            prop_assert_eq!(degree128(prod), degree64(a) + degree64(b));
        }

        #[test]
        fn division_identity_reconstructs_dividend(ahi: u128, alo: u128, b in 1u128..) {
            let a = Poly256::new(ahi, alo);
            let dm = cl_divmod(a, Poly256::from(b)).unwrap();
            prop_assert!(dm.remainder.degree() < degree128(b));
            prop_assert_eq!(shift_mul(dm.quotient, Poly256::from(b)) ^ dm.remainder, a);
        }

        #[test]
        fn mod_and_div_distribute_over_xor(a: u128, b: u128, p in 1u128..) {
            let pm = Poly256::from(p);
            let da = cl_divmod(Poly256::from(a), pm).unwrap();
            let db = cl_divmod(Poly256::from(b), pm).unwrap();
            let dx = cl_divmod(Poly256::from(a ^ b), pm).unwrap();
            prop_assert_eq!(dx.remainder, da.remainder ^ db.remainder);
            prop_assert_eq!(dx.quotient, da.quotient ^ db.quotient);
        }
    }

    /// Test-side carry-less multiply of arbitrary 256-bit operands: XOR of
    /// shifted copies of `b`, one per set bit of `q`. Valid whenever the true
    /// product fits 256 bits.
    fn shift_mul(q: Poly256, b: Poly256) -> Poly256 {
        let mut acc = Poly256::ZERO;
        for i in 0..256u32 {
            let set = if i < 128 {
                (q.lo >> i) & 1 == 1
            } else {
                (q.hi >> (i - 128)) & 1 == 1
            };
            if set {
                acc ^= b.shl(i);
            }
        }
        acc
    }
}
