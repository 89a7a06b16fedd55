//! On-disk formats: the raw-chunk corpus file (HKVC), the compressed chunk
//! store (HARG), profile CSVs and report CSVs. All binary layouts are
//! little-endian and platform independent.

mod chunk_store;
mod corpus_file;
mod profile;
pub mod report;

pub use chunk_store::{
    read_store, write_store, write_store_chunk, write_store_header, ChunkStore, STORE_MAGIC,
    STORE_VERSION,
};
pub use corpus_file::{read_corpus, write_corpus, CORPUS_MAGIC, CORPUS_VERSION};
pub use profile::{read_profile_csv, write_profile_csv};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad magic at byte 0: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated input at byte {offset}")]
    Truncated { offset: usize },
    #[error("invalid data at byte {offset}: {what}")]
    Invalid { offset: usize, what: String },
    #[error("line {line}: {what}")]
    Line { line: usize, what: String },
}

/// Little-endian cursor over an in-memory buffer; every failure names the
/// byte offset it happened at.
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn offset(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.remaining() < n {
            return Err(FormatError::Truncated { offset: self.buf.len() });
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    pub fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    pub fn i8(&mut self) -> Result<i8, FormatError> {
        Ok(self.take(1)?[0] as i8)
    }

    pub fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn f32(&mut self) -> Result<f32, FormatError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn invalid(&self, what: impl Into<String>) -> FormatError {
        FormatError::Invalid { offset: self.pos, what: what.into() }
    }
}

/// Element count with overflow and available-byte checks done before any
/// allocation, so hostile headers cannot trigger huge reserves.
pub(crate) fn checked_elements(
    r: &Reader,
    token_count: u32,
    width: u32,
    bytes_per_element: usize,
) -> Result<usize, FormatError> {
    if token_count == 0 || width == 0 {
        return Err(r.invalid("token_count and width must be positive"));
    }
    let elements = token_count as usize * width as usize;
    let needed = elements
        .checked_mul(bytes_per_element)
        .ok_or_else(|| r.invalid("element count overflows"))?;
    if r.remaining() < needed {
        return Err(FormatError::Truncated { offset: r.buf.len() });
    }
    Ok(elements)
}
