//! Bit-exact BF16 (brain floating point) representation.
//!
//! BF16 is 1 sign bit, 8 exponent bits (bias 127) and 7 fraction bits — the
//! top half of an IEEE-754 single. All 65536 patterns decode exactly to `f64`;
//! encoding from `f64` rounds to nearest with ties to the even fraction.

use thiserror::Error;

/// Exponent-field bias.
pub const EXP_BIAS: i32 = 127;
/// Fraction bits in the BF16 layout.
pub const FRACTION_BITS: u32 = 7;
/// Unbiased exponent assigned to subnormals and used as the histogram floor.
pub const MIN_EXPONENT: i32 = -126;
/// Smallest unbiased exponent of a normalized nonzero value (min subnormal is 2^-133).
pub const MIN_NORMALIZED_EXPONENT: i32 = -133;
/// Largest unbiased exponent of a finite value.
pub const MAX_EXPONENT: i32 = 127;

const SIGN_MASK: u16 = 0x8000;
const EXP_MASK: u16 = 0x7F80;
const FRAC_MASK: u16 = 0x007F;

#[derive(Debug, Error, PartialEq)]
pub enum ValueError {
    /// NaN or infinity where a finite value is required.
    #[error("non-finite value cannot be represented")]
    NonFinite,
    /// Magnitude rounds past the largest finite BF16 value.
    #[error("value {0} overflows the BF16 range")]
    Overflow(f64),
}

/// A single BF16 value, stored as its raw bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bf16(u16);

impl Bf16 {
    pub const ZERO: Bf16 = Bf16(0);
    /// Largest finite value, `0x7F7F` = 2^127 × (2 − 2^−7).
    pub const MAX: Bf16 = Bf16(0x7F7F);

    /// Wraps a raw bit pattern. Any pattern is allowed; chunk ingestion is
    /// responsible for rejecting NaN/Inf.
    #[inline]
    pub const fn from_bits(bits: u16) -> Self {
        Bf16(bits)
    }

    #[inline]
    pub const fn to_bits(self) -> u16 {
        self.0
    }

    /// Rounds a finite `f64` to the nearest BF16, ties to even fraction.
    pub fn from_f64(x: f64) -> Result<Self, ValueError> {
        if !x.is_finite() {
            return Err(ValueError::NonFinite);
        }
        let bits = x.to_bits();
        let sign = ((bits >> 48) & 0x8000) as u16;
        let exp_field = ((bits >> 52) & 0x7FF) as i32;
        if exp_field == 0 {
            // f64 subnormals are far below half the smallest BF16 subnormal.
            return Ok(Bf16(sign));
        }
        let unbiased = exp_field - 1023;
        // 53-bit significand with the implicit leading one.
        let sig = (1u64 << 52) | (bits & ((1u64 << 52) - 1));

        if unbiased >= MIN_EXPONENT {
            // Normal target: keep 8 significand bits, round the other 45.
            let (mut keep, rem) = (sig >> 45, sig & ((1u64 << 45) - 1));
            let half = 1u64 << 44;
            if rem > half || (rem == half && keep & 1 == 1) {
                keep += 1;
            }
            let mut exp = unbiased;
            if keep == 0x100 {
                keep = 0x80;
                exp += 1;
            }
            if exp > MAX_EXPONENT {
                return Err(ValueError::Overflow(x));
            }
            let exp_bits = ((exp + EXP_BIAS) as u16) << FRACTION_BITS;
            Ok(Bf16(sign | exp_bits | (keep as u16 & FRAC_MASK)))
        } else if unbiased >= MIN_NORMALIZED_EXPONENT - 1 {
            // Subnormal target: round |x| to an integer multiple of 2^-133.
            let shift = -(unbiased + 81) as u32;
            debug_assert!((46..=54).contains(&shift));
            let (mut frac, rem) = (sig >> shift, sig & ((1u64 << shift) - 1));
            let half = 1u64 << (shift - 1);
            if rem > half || (rem == half && frac & 1 == 1) {
                frac += 1;
            }
            // frac == 0x80 promotes to the smallest normal.
            Ok(Bf16(sign | frac as u16))
        } else {
            // Below half the smallest subnormal: rounds to signed zero.
            Ok(Bf16(sign))
        }
    }

    /// Exact value of the bit pattern. Subnormals decode with exponent −126
    /// and no implicit leading one; NaN/Inf patterns map to the f64 kinds.
    #[inline]
    pub fn to_f64(self) -> f64 {
        // BF16 is truncated f32, so padding the low 16 bits is exact,
        // including for subnormals.
        f32::from_bits((self.0 as u32) << 16) as f64
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 & EXP_MASK != EXP_MASK
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 & !SIGN_MASK == 0
    }

    #[inline]
    pub fn sign_bit(self) -> bool {
        self.0 & SIGN_MASK != 0
    }

    #[inline]
    pub fn fraction(self) -> u16 {
        self.0 & FRAC_MASK
    }

    #[inline]
    fn exp_field(self) -> u16 {
        (self.0 & EXP_MASK) >> FRACTION_BITS
    }

    /// Representation exponent: `exp_field − 127`, with subnormals pinned to
    /// −126. Always in `[−126, 127]` for finite values; zero has no meaningful
    /// exponent and also reports −126.
    #[inline]
    pub fn repr_exponent(self) -> i32 {
        match self.exp_field() {
            0 => MIN_EXPONENT,
            e => e as i32 - EXP_BIAS,
        }
    }

    /// Exponent and 7-bit fraction of the value renormalized to `1.f × 2^e`.
    /// Subnormals shift their fraction up until the leading one is implicit.
    /// Returns `None` for zero.
    pub fn normalized(self) -> Option<(i32, u16)> {
        if self.is_zero() {
            return None;
        }
        let exp_field = self.exp_field();
        if exp_field != 0 {
            return Some((exp_field as i32 - EXP_BIAS, self.fraction()));
        }
        // 0.f × 2^-126 == 1.(f << (z+1)) × 2^(-126 - z - 1)
        let frac = self.fraction();
        let z = frac.leading_zeros() as i32 - 9; // leading zeros within the 7-bit field
        let shifted = (frac << (z + 1)) & FRAC_MASK;
        Some((MIN_EXPONENT - z - 1, shifted))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Nearest-pattern search over every finite BF16 code, ties to the even
    /// bit pattern. Independent of the production rounding path.
    fn nearest_by_search(x: f64) -> u16 {
        let mut best_bits = 0u16;
        let mut best_err = f64::INFINITY;
        for bits in 0..=u16::MAX {
            let v = Bf16::from_bits(bits);
            if !v.is_finite() {
                continue;
            }
            let err = (v.to_f64() - x).abs();
            if err < best_err || (err == best_err && bits & 1 == 0 && best_bits & 1 == 1) {
                best_err = err;
                best_bits = bits;
            }
        }
        best_bits
    }

    #[test]
    fn exact_encodings() {
        assert_eq!(Bf16::from_f64(1.0).unwrap().to_bits(), 0x3F80);
        assert_eq!(Bf16::from_f64(0.0).unwrap().to_bits(), 0x0000);
        assert_eq!(Bf16::from_f64(-2.0).unwrap().to_bits(), 0xC000);
    }

    #[test]
    fn tenth_rounds_to_nearest() {
        let got = Bf16::from_f64(0.1).unwrap().to_bits();
        assert_eq!(got, nearest_by_search(0.1));
    }

    #[test]
    fn exact_decodings() {
        assert_eq!(Bf16::from_bits(0x3F80).to_f64(), 1.0);
        assert_eq!(Bf16::from_bits(0xC000).to_f64(), -2.0);
        assert_eq!(Bf16::from_bits(0x0001).to_f64(), 2f64.powi(-133));
    }

    #[test]
    fn non_finite_rejected() {
        assert_eq!(Bf16::from_f64(f64::NAN), Err(ValueError::NonFinite));
        assert_eq!(Bf16::from_f64(f64::INFINITY), Err(ValueError::NonFinite));
        assert!(matches!(Bf16::from_f64(1e39), Err(ValueError::Overflow(_))));
        // Largest f64 that still rounds down to BF16::MAX.
        let below = Bf16::MAX.to_f64() * (1.0 + 2f64.powi(-9));
        assert_eq!(Bf16::from_f64(below).unwrap(), Bf16::MAX);
    }

    #[test]
    fn round_trip_all_finite_patterns() {
        for bits in 0..=u16::MAX {
            let v = Bf16::from_bits(bits);
            if !v.is_finite() {
                continue;
            }
            assert_eq!(Bf16::from_f64(v.to_f64()).unwrap().to_bits(), bits, "bits {bits:#06x}");
        }
    }

    #[test]
    fn pattern_order_matches_numeric_order() {
        let mut prev = None;
        for bits in 0..0x7F80u16 {
            let v = Bf16::from_bits(bits).to_f64();
            if let Some(p) = prev {
                assert!(v > p, "positive patterns must be strictly increasing at {bits:#06x}");
            }
            prev = Some(v);
        }
        // Negative patterns reverse the order.
        assert!(Bf16::from_bits(0x8001).to_f64() > Bf16::from_bits(0x8002).to_f64());
    }

    #[test]
    fn subnormal_boundaries() {
        let min_sub = 2f64.powi(-133);
        assert_eq!(Bf16::from_f64(min_sub).unwrap().to_bits(), 0x0001);
        // Exactly half the min subnormal ties to even (zero).
        assert_eq!(Bf16::from_f64(min_sub / 2.0).unwrap().to_bits(), 0x0000);
        assert_eq!(Bf16::from_f64(min_sub * 0.75).unwrap().to_bits(), 0x0001);
        // Subnormals promote to the smallest normal when rounding up.
        let just_under_normal = 2f64.powi(-126) * (1.0 - 2f64.powi(-10));
        assert_eq!(Bf16::from_f64(just_under_normal).unwrap().to_bits(), 0x0080);
    }

    #[test]
    fn normalized_exponents() {
        assert_eq!(Bf16::from_f64(1.5).unwrap().normalized(), Some((0, 0x40)));
        assert_eq!(Bf16::from_f64(6.0).unwrap().normalized(), Some((2, 0x40)));
        assert_eq!(Bf16::from_bits(0x0001).normalized(), Some((-133, 0)));
        assert_eq!(Bf16::from_bits(0x0040).normalized(), Some((-127, 0)));
        assert_eq!(Bf16::ZERO.normalized(), None);
        assert_eq!(Bf16::from_bits(0x0001).repr_exponent(), -126);
        assert_eq!(Bf16::from_f64(6.0).unwrap().repr_exponent(), 2);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rounding_matches_exhaustive_search(bits in 0u16..=u16::MAX, num in -255i32..=255, den in 1i32..=255) {
                let base = Bf16::from_bits(bits);
                prop_assume!(base.is_finite());
                // Perturb a representable value by a small rational so ties occur.
                let x = base.to_f64() * (1.0 + num as f64 / (den as f64 * 512.0));
                prop_assume!(x.is_finite() && x.abs() <= Bf16::MAX.to_f64());
                prop_assert_eq!(Bf16::from_f64(x).unwrap().to_bits(), nearest_by_search(x));
            }
        }
    }
}
