//! FP8 E4M3 and E5M2 software codecs.
//!
//! E4M3 follows the no-infinity convention: the all-ones pattern is the single
//! NaN and the largest finite value is 448. E5M2 keeps IEEE-style Inf/NaN
//! codes and tops out at 57344. Neither non-finite code is ever emitted;
//! overflow saturates to the max finite value.

use std::sync::OnceLock;

use crate::bf16::Bf16;
use crate::chunk::{KvChunk, Scheme};
use crate::codec::{expect_scheme, CodecError, CompressedChunk, SchemeMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fp8Variant {
    E4M3,
    E5M2,
}

impl Fp8Variant {
    const fn mantissa_bits(self) -> u32 {
        match self {
            Fp8Variant::E4M3 => 3,
            Fp8Variant::E5M2 => 2,
        }
    }

    const fn bias(self) -> i32 {
        match self {
            Fp8Variant::E4M3 => 7,
            Fp8Variant::E5M2 => 15,
        }
    }

    /// Largest positive code that is finite.
    const fn max_finite_code(self) -> u8 {
        match self {
            Fp8Variant::E4M3 => 0x7E, // 0.1111.110 = 448
            Fp8Variant::E5M2 => 0x7B, // 0.11110.11 = 57344
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            Fp8Variant::E4M3 => Scheme::Fp8E4M3,
            Fp8Variant::E5M2 => Scheme::Fp8E5M2,
        }
    }

    /// Exact value of a code, or `None` for NaN/Inf codes.
    pub fn decode_code(self, code: u8) -> Option<f64> {
        let m_bits = self.mantissa_bits();
        let mag = code & 0x7F;
        let exp_field = (mag >> m_bits) as i32;
        let frac = (mag & ((1 << m_bits) - 1)) as f64;
        match self {
            Fp8Variant::E4M3 if mag == 0x7F => return None,
            Fp8Variant::E5M2 if exp_field == 0x1F => return None,
            _ => {}
        }
        let value = if exp_field == 0 {
            // Subnormal: 0.frac x 2^(1-bias)
            frac * 2f64.powi(1 - self.bias() - m_bits as i32)
        } else {
            (1.0 + frac * 2f64.powi(-(m_bits as i32))) * 2f64.powi(exp_field - self.bias())
        };
        Some(if code & 0x80 != 0 { -value } else { value })
    }

    /// Values of codes `0..=max_finite_code`, ascending.
    fn positive_table(self) -> &'static [f64] {
        static E4M3: OnceLock<Vec<f64>> = OnceLock::new();
        static E5M2: OnceLock<Vec<f64>> = OnceLock::new();
        let cell = match self {
            Fp8Variant::E4M3 => &E4M3,
            Fp8Variant::E5M2 => &E5M2,
        };
        cell.get_or_init(|| {
            (0..=self.max_finite_code()).map(|c| self.decode_code(c).unwrap()).collect()
        })
    }

    /// Nearest finite code for a finite value: round-to-nearest, ties to the
    /// even code, saturating beyond the largest finite magnitude.
    pub fn encode_value(self, x: f64) -> u8 {
        let sign = if x.is_sign_negative() { 0x80 } else { 0 };
        let mag = x.abs();
        let table = self.positive_table();
        let hi = table.partition_point(|&v| v < mag);
        let code = if hi >= table.len() {
            self.max_finite_code()
        } else if hi == 0 {
            0
        } else {
            let (lo_code, hi_code) = (hi - 1, hi);
            let (d_lo, d_hi) = (mag - table[lo_code], table[hi_code] - mag);
            if d_lo < d_hi || (d_lo == d_hi && lo_code & 1 == 0) {
                lo_code as u8
            } else {
                hi_code as u8
            }
        };
        sign | code
    }
}

pub(crate) fn encode(chunk: &KvChunk, variant: Fp8Variant) -> CompressedChunk {
    let payload = chunk.data().iter().map(|v| variant.encode_value(v.to_f64())).collect();
    CompressedChunk {
        id: chunk.id(),
        kind: chunk.kind(),
        scheme: variant.scheme(),
        token_count: chunk.token_count(),
        width: chunk.width(),
        payload,
        meta: SchemeMeta::None,
    }
}

pub(crate) fn decode(c: &CompressedChunk) -> Result<KvChunk, CodecError> {
    expect_scheme(c, |s| matches!(s, Scheme::Fp8E4M3 | Scheme::Fp8E5M2), "fp8")?;
    let variant = if c.scheme == Scheme::Fp8E4M3 { Fp8Variant::E4M3 } else { Fp8Variant::E5M2 };
    let data = c
        .payload
        .iter()
        .map(|&b| {
            let value = variant
                .decode_code(b)
                .ok_or_else(|| CodecError::CorruptPayload(format!("non-finite fp8 code {b:#04x}")))?;
            // FP8 fractions and exponents are strict subsets of BF16's.
            Ok(Bf16::from_f64(value).expect("fp8 values are exact in BF16"))
        })
        .collect::<Result<Vec<_>, CodecError>>()?;
    Ok(KvChunk::new(c.id, c.kind, c.token_count, c.width, data)?)
}
