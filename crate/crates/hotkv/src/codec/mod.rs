//! Encode/decode between BF16 chunks and the four 8-bit representations.
//!
//! Every scheme stores exactly one payload byte per element; per-chunk
//! metadata is a 4-byte scale (INT8), a small shared-exponent array (GSE-8),
//! or nothing (FP8).

mod fp8;
mod gse8;
mod int8;

pub use fp8::Fp8Variant;
pub use gse8::{build_gse_exponent_array, GseArray, GseLayout};

use thiserror::Error;

use crate::chunk::{ChunkError, ChunkKind, KvChunk, Scheme};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("expected scheme {expected:?}, found {found:?}")]
    SchemeMismatch { expected: &'static str, found: Scheme },
    #[error("GSE exponent array requires at least one nonzero element")]
    AllZeroChunk,
    #[error("invalid GSE layout: 1 + {e_bits} + {m_bits} != 8 or field too narrow")]
    InvalidLayout { e_bits: u8, m_bits: u8 },
    #[error("corrupt payload: {0}")]
    CorruptPayload(String),
    #[error(transparent)]
    Chunk(#[from] ChunkError),
}

/// Scheme-specific metadata carried alongside the payload.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeMeta {
    /// FP8 variants are self-contained.
    None,
    /// Symmetric quantization scale; always positive.
    Int8 { scale: f32 },
    /// Shared-exponent array (ascending), the step it was built with, and the
    /// bit layout needed to split payload bytes.
    Gse8 { layout: GseLayout, array: GseArray },
}

impl SchemeMeta {
    /// Bytes this metadata occupies in a chunk store record.
    pub fn stored_bytes(&self) -> u64 {
        match self {
            SchemeMeta::None => 0,
            SchemeMeta::Int8 { .. } => 4,
            // length byte + step byte + one byte per exponent
            SchemeMeta::Gse8 { array, .. } => 2 + array.exponents.len() as u64,
        }
    }
}

/// An 8-bit-compressed KV chunk: scheme tag, payload (1 byte per element)
/// and per-scheme metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedChunk {
    pub id: u32,
    pub kind: ChunkKind,
    pub scheme: Scheme,
    pub token_count: u32,
    pub width: u32,
    pub payload: Vec<u8>,
    pub meta: SchemeMeta,
}

impl CompressedChunk {
    /// Payload plus metadata bytes — the denominator of the compression ratio.
    pub fn compressed_bytes(&self) -> u64 {
        self.payload.len() as u64 + self.meta.stored_bytes()
    }

    /// Size of the chunk before compression (2 bytes per element).
    pub fn raw_bytes(&self) -> u64 {
        self.payload.len() as u64 * 2
    }

    pub fn element_count(&self) -> usize {
        self.token_count as usize * self.width as usize
    }
}

/// Compresses a chunk with the given scheme. GSE-8 uses `layout`; the other
/// schemes ignore it.
pub fn compress(chunk: &KvChunk, scheme: Scheme, layout: GseLayout) -> CompressedChunk {
    match scheme {
        Scheme::Int8 => int8::encode(chunk),
        Scheme::Fp8E4M3 => fp8::encode(chunk, Fp8Variant::E4M3),
        Scheme::Fp8E5M2 => fp8::encode(chunk, Fp8Variant::E5M2),
        Scheme::Gse8 => gse8::encode(chunk, layout),
    }
}

/// Reconstructs a BF16 chunk from its compressed form.
pub fn decompress(c: &CompressedChunk) -> Result<KvChunk, CodecError> {
    if c.payload.len() != c.element_count() {
        return Err(CodecError::CorruptPayload(format!(
            "payload length {} != token_count {} x width {}",
            c.payload.len(),
            c.token_count,
            c.width
        )));
    }
    match c.scheme {
        Scheme::Int8 => int8::decode(c),
        Scheme::Fp8E4M3 | Scheme::Fp8E5M2 => fp8::decode(c),
        Scheme::Gse8 => gse8::decode(c),
    }
}

pub(crate) fn expect_scheme(
    c: &CompressedChunk,
    ok: impl Fn(Scheme) -> bool,
    expected: &'static str,
) -> Result<(), CodecError> {
    if ok(c.scheme) {
        Ok(())
    } else {
        Err(CodecError::SchemeMismatch { expected, found: c.scheme })
    }
}
