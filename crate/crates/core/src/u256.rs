//! Minimal 256-bit unsigned arithmetic, wrapping mod 2^256.
//!
//! This is the phase accumulator: a fraction in [0,1) is stored as its
//! numerator over 2^256. Addition and multiplication by a machine word are
//! exact mod 2^256, so iterated phase stepping never drifts.

use num_bigint::BigUint;

/// Little-endian 4-limb unsigned integer, all operations mod 2^256.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct U256(pub [u64; 4]);

#[allow(clippy::needless_range_loop)] // limb carry chains read best indexed
impl U256 {
    #[inline]
    pub fn wrapping_add(self, rhs: U256) -> U256 {
        let mut out = [0u64; 4];
        let mut carry = 0u64;
        for i in 0..4 {
            let (s1, c1) = self.0[i].overflowing_add(rhs.0[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            out[i] = s2;
            carry = (c1 as u64) + (c2 as u64);
        }
        U256(out)
    }

    /// Low 256 bits of `self * m`.
    #[inline]
    pub fn wrapping_mul_u64(self, m: u64) -> U256 {
        let mut out = [0u64; 4];
        let mut carry = 0u128;
        for i in 0..4 {
            let prod = self.0[i] as u128 * m as u128 + carry;
            out[i] = prod as u64;
            carry = prod >> 64;
        }
        U256(out)
    }

    /// Most significant limb: the top 64 bits of the fraction.
    #[inline]
    pub fn hi64(self) -> u64 {
        self.0[3]
    }

    /// The fraction value rounded to f64, in [0, 1).
    #[inline]
    pub fn to_unit_f64(self) -> f64 {
        // hi64 as f64 rounds to nearest; the corner where it rounds up to
        // 2^64 is the same point on the circle as 0.
        let phi = self.hi64() as f64 * (1.0 / 18446744073709551616.0);
        if phi >= 1.0 {
            0.0
        } else {
            phi
        }
    }

    /// Low 256 bits of a BigUint.
    pub fn from_biguint(b: &BigUint) -> U256 {
        let mut out = [0u64; 4];
        for (i, d) in b.iter_u64_digits().take(4).enumerate() {
            out[i] = d;
        }
        U256(out)
    }

    #[cfg(test)]
    pub fn to_biguint(self) -> BigUint {
        BigUint::from_slice(
            &self
                .0
                .iter()
                .flat_map(|&l| [l as u32, (l >> 32) as u32])
                .collect::<Vec<_>>(),
        )
    }
}
