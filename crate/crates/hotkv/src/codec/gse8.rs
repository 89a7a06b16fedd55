//! GSE-8: grouped-shared-exponent 8-bit encoding.
//!
//! Each chunk carries a small ascending array of shared exponents covering
//! its exponent range in fixed steps. A byte stores the sign, an index into
//! that array, and a denormalized fraction whose leading-1 marker position
//! encodes how far the element's true exponent sits below the shared one:
//! with `d = shared - true`, the marker occupies bit `d+1` from the field's
//! MSB and the remaining `m_bits - d - 1` bits hold the top of the BF16
//! fraction, truncated.

use crate::bf16::Bf16;
use crate::chunk::{KvChunk, Scheme};
use crate::codec::{expect_scheme, CodecError, CompressedChunk, SchemeMeta};

/// Bit split of the GSE-8 byte: 1 sign + `e_bits` index + `m_bits` fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GseLayout {
    e_bits: u8,
    m_bits: u8,
}

impl GseLayout {
    pub fn new(e_bits: u8, m_bits: u8) -> Result<Self, CodecError> {
        if 1 + e_bits + m_bits != 8 || e_bits < 2 || m_bits < 2 {
            return Err(CodecError::InvalidLayout { e_bits, m_bits });
        }
        Ok(GseLayout { e_bits, m_bits })
    }

    pub fn e_bits(self) -> u8 {
        self.e_bits
    }

    pub fn m_bits(self) -> u8 {
        self.m_bits
    }

    /// Widest exponent gap the fraction field bridges without truncating the
    /// marker itself.
    fn base_step(self) -> u8 {
        self.m_bits - 1
    }

    fn max_entries(self) -> usize {
        1 << self.e_bits
    }
}

impl Default for GseLayout {
    /// The 1+4+3 split; measured as the lowest-error of the 8-bit splits.
    fn default() -> Self {
        GseLayout { e_bits: 4, m_bits: 3 }
    }
}

/// Shared-exponent array plus the step it was built with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GseArray {
    /// Strictly ascending unbiased exponents; adjacent gaps never exceed `step`.
    pub exponents: Vec<i8>,
    /// `m_bits - 1`, widened when the exponent range needs more entries than
    /// the index field can address.
    pub step: u8,
}

impl GseArray {
    /// Smallest entry `>= e`, with its index. `None` when `e` exceeds every
    /// entry (the saturation case).
    fn covering(&self, e: i32) -> Option<(usize, i32)> {
        let idx = self.exponents.partition_point(|&g| (g as i32) < e);
        self.exponents.get(idx).map(|&g| (idx, g as i32))
    }
}

/// Builds the shared exponent array for a chunk: right endpoints walking the
/// chunk's exponent range `[Emin, Emax]` in `step`-sized strides, ascending,
/// with `Emax` always included so the largest-magnitude values encode with no
/// shift. Exponents come from the BF16 representation (subnormals pin to
/// −126), so entries always fit a signed byte.
pub fn build_gse_exponent_array(chunk: &KvChunk, layout: GseLayout) -> Result<GseArray, CodecError> {
    let mut range: Option<(i32, i32)> = None;
    for v in chunk.data() {
        if v.is_zero() {
            continue;
        }
        let e = v.repr_exponent();
        range = Some(match range {
            None => (e, e),
            Some((lo, hi)) => (lo.min(e), hi.max(e)),
        });
    }
    let (emin, emax) = range.ok_or(CodecError::AllZeroChunk)?;
    let span = (emax - emin) as u32;
    let mut step = layout.base_step() as u32;
    if span > 0 {
        // Minimum step that keeps ceil(span/step)+1 entries addressable.
        step = step.max(span.div_ceil(layout.max_entries() as u32 - 1));
    }
    let mut exponents = Vec::new();
    let mut e = emin;
    while e < emax {
        exponents.push(e as i8);
        e += step as i32;
    }
    exponents.push(emax as i8);
    debug_assert!(exponents.len() <= layout.max_entries());
    Ok(GseArray { exponents, step: step as u8 })
}

fn encode_element(v: Bf16, layout: GseLayout, array: &GseArray) -> u8 {
    let m_bits = layout.m_bits as u32;
    let Some((e, frac)) = v.normalized() else {
        return 0x00; // zero element: sign 0, index 0, fraction 0
    };
    let sign = (v.sign_bit() as u8) << 7;
    match array.covering(e) {
        Some((idx, g)) => {
            let d = (g - e) as u32;
            if d + 1 > m_bits {
                // Too far below the covering exponent: flush to zero.
                return sign;
            }
            let kept = m_bits - 1 - d;
            let field = (1u8 << kept) | (frac >> (7 - kept)) as u8;
            sign | (idx as u8) << m_bits | field
        }
        None => {
            // Above the array: saturate to all-ones at the top entry.
            let idx = array.exponents.len() - 1;
            let field = (1u8 << m_bits) - 1;
            sign | (idx as u8) << m_bits | field
        }
    }
}

pub(crate) fn encode(chunk: &KvChunk, layout: GseLayout) -> CompressedChunk {
    let array = match build_gse_exponent_array(chunk, layout) {
        Ok(array) => array,
        // All-zero chunk: zero payload with an empty array.
        Err(_) => GseArray { exponents: Vec::new(), step: layout.base_step() },
    };
    let payload = chunk.data().iter().map(|&v| encode_element(v, layout, &array)).collect();
    CompressedChunk {
        id: chunk.id(),
        kind: chunk.kind(),
        scheme: Scheme::Gse8,
        token_count: chunk.token_count(),
        width: chunk.width(),
        payload,
        meta: SchemeMeta::Gse8 { layout, array },
    }
}

pub(crate) fn decode(c: &CompressedChunk) -> Result<KvChunk, CodecError> {
    expect_scheme(c, |s| s == Scheme::Gse8, "gse8")?;
    let (layout, array) = match &c.meta {
        SchemeMeta::Gse8 { layout, array } => (*layout, array),
        _ => return Err(CodecError::CorruptPayload("gse8 chunk without exponent array".into())),
    };
    let m_bits = layout.m_bits as u32;
    let data = c
        .payload
        .iter()
        .map(|&b| {
            let field = b & ((1u8 << m_bits) - 1);
            let sign = (b >> 7) as u16;
            if field == 0 {
                return Ok(Bf16::from_bits(sign << 15));
            }
            let idx = ((b >> m_bits) & ((1u8 << layout.e_bits) - 1)) as usize;
            let g = *array.exponents.get(idx).ok_or_else(|| {
                CodecError::CorruptPayload(format!(
                    "exponent index {idx} out of range for array of {}",
                    array.exponents.len()
                ))
            })? as i32;
            let marker = 7 - field.leading_zeros() as i32;
            let d = (m_bits as i32 - 1) - marker;
            let exponent = g - d;
            let kept = marker as u32;
            let frac7 = ((field & ((1u8 << kept) - 1)) as u16) << (7 - kept);
            let value = (1.0 + frac7 as f64 / 128.0) * 2f64.powi(exponent);
            let value = if sign == 1 { -value } else { value };
            Ok(Bf16::from_f64(value).expect("GSE-8 exponents never leave the BF16 range"))
        })
        .collect::<Result<Vec<_>, CodecError>>()?;
    Ok(KvChunk::new(c.id, c.kind, c.token_count, c.width, data)?)
}
