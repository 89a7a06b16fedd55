//! KV-chunk container shared by the codecs, analysis and placement layers.

use thiserror::Error;

use crate::bf16::Bf16;

/// Whether a chunk holds attention Keys or Values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChunkKind {
    Key,
    Value,
}

impl ChunkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChunkKind::Key => "key",
            ChunkKind::Value => "value",
        }
    }
}

/// The four 8-bit compression schemes, ordered hottest-first: the scheme at a
/// lower ordinal is assigned to more frequently accessed chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Int8,
    Fp8E4M3,
    Fp8E5M2,
    Gse8,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Int8, Scheme::Fp8E4M3, Scheme::Fp8E5M2, Scheme::Gse8];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Int8 => "int8",
            Scheme::Fp8E4M3 => "fp8e4m3",
            Scheme::Fp8E5M2 => "fp8e5m2",
            Scheme::Gse8 => "gse8",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChunkError {
    #[error("chunk {id}: data length {len} != token_count {tokens} x width {width}")]
    LengthMismatch { id: u32, len: usize, tokens: u32, width: u32 },
    #[error("chunk {id}: empty data")]
    Empty { id: u32 },
    #[error("chunk {id}: non-finite element at index {index}")]
    NonFinite { id: u32, index: usize },
}

/// A raw BF16 Key or Value chunk: the unit of compression and placement.
///
/// Data is flat; `token_count × width` elements with no layer/head structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KvChunk {
    id: u32,
    kind: ChunkKind,
    token_count: u32,
    width: u32,
    data: Vec<Bf16>,
}

impl KvChunk {
    /// Validates shape and finiteness at ingestion; NaN/Inf never enter a corpus.
    pub fn new(
        id: u32,
        kind: ChunkKind,
        token_count: u32,
        width: u32,
        data: Vec<Bf16>,
    ) -> Result<Self, ChunkError> {
        if data.is_empty() || token_count == 0 || width == 0 {
            return Err(ChunkError::Empty { id });
        }
        let expected = token_count as usize * width as usize;
        if data.len() != expected {
            return Err(ChunkError::LengthMismatch { id, len: data.len(), tokens: token_count, width });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(ChunkError::NonFinite { id, index });
        }
        Ok(KvChunk { id, kind, token_count, width, data })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn kind(&self) -> ChunkKind {
        self.kind
    }

    pub fn token_count(&self) -> u32 {
        self.token_count
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn data(&self) -> &[Bf16] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Uncompressed size in bytes (2 bytes per BF16 element).
    pub fn raw_bytes(&self) -> u64 {
        self.data.len() as u64 * 2
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().map(|v| v.to_f64())
    }
}
