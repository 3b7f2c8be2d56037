//! The field GF(2^64): XOR as addition, carry-less multiply followed by
//! reduction modulo `p = 2^64 ⊕ 27` as multiplication.
//!
//! The modulus was chosen irreducible with a minimal second-highest bit
//! (degree 4), which makes a one-multiplication reduction possible: the high
//! half folds down through a single carry-less multiply by 27, and the 4-bit
//! spill that produces is resolved by a 16-entry byte table.

use crate::clbits::{cl_divmod, clmul128, clmul64, ClmulBackend, Poly256};

/// Low part of the modulus: `p = 2^64 ⊕ r` with `r = 2^4 + 2^3 + 2 + 1`.
pub const GF64_R: u64 = 27;

/// The degree-64 irreducible modulus `2^64 ⊕ 27`.
pub const GF64_MODULUS: u128 = (1u128 << 64) | 27;

/// Precomputed `(w ⋆ 2^64) mod p` for every 4-bit `w`. Each entry fits a
/// byte because its degree is at most `degree(w) + degree(r) <= 7`.
pub const REDUCTION_TABLE: [u8; 16] = [
    0, 27, 54, 45, 108, 119, 90, 65, 216, 195, 238, 245, 180, 175, 130, 153,
];

/// The field parameters, bundled so self-tests can re-derive and cross-check
/// the compiled-in constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf64Params {
    pub p: u128,
    pub r: u64,
    pub memo_table: [u8; 16],
}

impl Gf64Params {
    pub const fn standard() -> Self {
        Gf64Params {
            p: GF64_MODULUS,
            r: GF64_R,
            memo_table: REDUCTION_TABLE,
        }
    }

    /// Re-derive the 16-entry table from scratch with the division oracle.
    pub fn derive_memo_table() -> [u8; 16] {
        let p = Poly256::from(GF64_MODULUS);
        let mut table = [0u8; 16];
        for (w, slot) in table.iter_mut().enumerate() {
            let shifted = clmul128(w as u128, 1u128 << 64);
            let rem = cl_divmod(shifted, p)
                .expect("modulus is nonzero")
                .remainder
                .expect_u128();
            debug_assert!(rem < 256);
            *slot = rem as u8;
        }
        table
    }

    /// Check the compiled-in table against a fresh derivation.
    pub fn self_check(&self) -> Result<(), [u8; 16]> {
        let derived = Self::derive_memo_table();
        if derived == self.memo_table {
            Ok(())
        } else {
            Err(derived)
        }
    }
}

#[inline(always)]
pub(crate) fn reduce128_backend<E: ClmulBackend>(x: u128) -> u64 {
    // z = (x ÷ 2^64) ⋆ r has degree <= 67, so z ÷ 2^64 is a 4-bit index.
    let z = E::mul64((x >> 64) as u64, GF64_R);
    let w = (z >> 64) as usize;
    (x as u64) ^ (z as u64) ^ u64::from(REDUCTION_TABLE[w])
}

/// Reduce a 128-bit carry-less product modulo `2^64 ⊕ 27`.
///
/// Bit-exact with the remainder computed by the Euclidean division oracle,
/// but uses one carry-less multiply and a table lookup instead of a loop.
#[inline]
pub fn reduce128(x: u128) -> u64 {
    #[cfg(target_arch = "x86_64")]
    if crate::clbits::hw_clmul_available() {
        return reduce128_backend::<crate::clbits::HardwareBackend>(x);
    }
    reduce128_backend::<crate::clbits::PortableBackend>(x)
}

/// Multiplication in GF(2^64).
#[inline]
pub fn gf64_mul(a: u64, b: u64) -> u64 {
    reduce128(clmul64(a, b))
}

/// Exponentiation in GF(2^64) by square-and-multiply; `a^0 = 1`.
pub fn gf64_pow(a: u64, e: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = gf64_mul(acc, base);
        }
        base = gf64_mul(base, base);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clbits::{cl_rem, is_irreducible, Poly256};
    use crate::SplitMix64;
    use proptest::prelude::*;

    #[test]
    fn modulus_is_irreducible() {
        assert!(is_irreducible(GF64_MODULUS));
    }

    #[test]
    fn table_rederivation_matches_constants() {
        assert_eq!(Gf64Params::standard().self_check(), Ok(()));
        assert_eq!(Gf64Params::derive_memo_table(), REDUCTION_TABLE);
    }

    #[test]
    fn reduce_is_identity_below_field_width() {
        assert_eq!(reduce128(0), 0);
        assert_eq!(reduce128(1), 1);
        assert_eq!(reduce128(u64::MAX as u128), u64::MAX);
    }

    #[test]
    fn reduce_of_two_to_the_64_is_27() {
        assert_eq!(reduce128(1u128 << 64), 27);
    }

    #[test]
    fn reduce_matches_division_oracle() {
        let mut rng = SplitMix64::new(0x6F64);
        for _ in 0..100_000 {
            let x = ((rng.next_u64() as u128) << 64) | rng.next_u64() as u128;
            assert_eq!(reduce128(x) as u128, cl_rem(Poly256::from(x), GF64_MODULUS));
        }
    }

    #[test]
    fn mul_identity_and_annihilator() {
        let mut rng = SplitMix64::new(0x6F65);
        for _ in 0..100 {
            let a = rng.next_u64();
            assert_eq!(gf64_mul(a, 1), a);
            assert_eq!(gf64_mul(1, a), a);
            assert_eq!(gf64_mul(a, 0), 0);
            assert_eq!(gf64_mul(0, a), 0);
        }
    }

    #[test]
    fn pow_edge_cases() {
        let mut rng = SplitMix64::new(0x6F66);
        for _ in 0..50 {
            let a = rng.next_u64();
            assert_eq!(gf64_pow(a, 0), 1);
            assert_eq!(gf64_pow(a, 1), a);
        }
        assert_eq!(gf64_pow(0, 5), 0);
    }

    #[test]
    fn nonzero_elements_have_multiplicative_order_dividing_group_order() {
        // a^(2^64 - 1) = 1: Lagrange in the multiplicative group, and a smoke
        // test that the modulus really is irreducible.
        let mut rng = SplitMix64::new(0x6F67);
        for _ in 0..64 {
            let mut a = rng.next_u64();
            while a == 0 {
                a = rng.next_u64();
            }
            assert_eq!(gf64_pow(a, u64::MAX), 1);
        }
    }

    proptest! {
        #[test]
        fn reduce_is_xor_linear(x: u128, y: u128) {
            prop_assert_eq!(reduce128(x ^ y), reduce128(x) ^ reduce128(y));
        }

        #[test]
        fn mul_is_commutative_and_distributes(a: u64, b: u64, c: u64) {
            prop_assert_eq!(gf64_mul(a, b), gf64_mul(b, a));
            prop_assert_eq!(gf64_mul(a, b ^ c), gf64_mul(a, b) ^ gf64_mul(a, c));
        }

        #[test]
        fn mul_is_associative(a: u64, b: u64, c: u64) {
            prop_assert_eq!(gf64_mul(gf64_mul(a, b), c), gf64_mul(a, gf64_mul(b, c)));
        }

        #[test]
        fn mul_matches_oracle_route(a: u64, b: u64) {
            let oracle = cl_rem(Poly256::from(clmul64(a, b)), GF64_MODULUS) as u64;
            prop_assert_eq!(gf64_mul(a, b), oracle);
        }
    }
}
