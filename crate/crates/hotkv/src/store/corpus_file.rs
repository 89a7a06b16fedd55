//! The raw-chunk corpus format: magic `HKVC`, version u16, then per chunk
//! `id u32, kind u8, token_count u32, width u32` followed by
//! `token_count × width` BF16 words. Little-endian throughout; chunks repeat
//! until end of file.

use std::collections::HashSet;
use std::io::Write;

use crate::bf16::Bf16;
use crate::chunk::{ChunkKind, KvChunk};
use crate::store::{checked_elements, FormatError, Reader};

pub const CORPUS_MAGIC: &[u8; 4] = b"HKVC";
pub const CORPUS_VERSION: u16 = 1;

pub fn write_corpus(out: &mut impl Write, chunks: &[KvChunk]) -> Result<(), FormatError> {
    out.write_all(CORPUS_MAGIC)?;
    out.write_all(&CORPUS_VERSION.to_le_bytes())?;
    for chunk in chunks {
        out.write_all(&chunk.id().to_le_bytes())?;
        out.write_all(&[chunk.kind() as u8])?;
        out.write_all(&chunk.token_count().to_le_bytes())?;
        out.write_all(&chunk.width().to_le_bytes())?;
        let mut words = Vec::with_capacity(chunk.len() * 2);
        for v in chunk.data() {
            words.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        out.write_all(&words)?;
    }
    Ok(())
}

pub fn read_corpus(bytes: &[u8]) -> Result<Vec<KvChunk>, FormatError> {
    let mut r = Reader::new(bytes);
    if r.take(4).map_err(|_| FormatError::BadMagic { expected: "HKVC" })? != CORPUS_MAGIC {
        return Err(FormatError::BadMagic { expected: "HKVC" });
    }
    let version = r.u16()?;
    if version != CORPUS_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let mut chunks = Vec::new();
    let mut seen = HashSet::new();
    while !r.is_empty() {
        let record_start = r.offset();
        let id = r.u32()?;
        if !seen.insert(id) {
            return Err(FormatError::Invalid { offset: record_start, what: format!("duplicate chunk id {id}") });
        }
        let kind = match r.u8()? {
            0 => ChunkKind::Key,
            1 => ChunkKind::Value,
            k => return Err(r.invalid(format!("unknown chunk kind {k}"))),
        };
        let token_count = r.u32()?;
        let width = r.u32()?;
        let elements = checked_elements(&r, token_count, width, 2)?;
        let mut data = Vec::with_capacity(elements);
        let words = r.take(elements * 2)?;
        for (i, pair) in words.chunks_exact(2).enumerate() {
            let v = Bf16::from_bits(u16::from_le_bytes([pair[0], pair[1]]));
            if !v.is_finite() {
                return Err(FormatError::Invalid {
                    offset: record_start + 13 + i * 2,
                    what: format!("non-finite BF16 word {:#06x}", v.to_bits()),
                });
            }
            data.push(v);
        }
        let chunk = KvChunk::new(id, kind, token_count, width, data)
            .map_err(|e| FormatError::Invalid { offset: record_start, what: e.to_string() })?;
        chunks.push(chunk);
    }
    Ok(chunks)
}
