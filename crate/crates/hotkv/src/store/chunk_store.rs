//! The compressed chunk store: header `HARG`, version u16, chunk_count u32,
//! GSE layout (e_bits u8, m_bits u8); then per chunk `id u32, kind u8,
//! scheme u8, token_count u32, width u32`, scheme metadata (INT8: scale f32;
//! GSE-8: step u8, len u8, exponents i8 × len; FP8: nothing) and the payload.

use std::io::Write;

use crate::chunk::{ChunkKind, Scheme};
use crate::codec::{CompressedChunk, GseArray, GseLayout, SchemeMeta};
use crate::store::{checked_elements, FormatError, Reader};

pub const STORE_MAGIC: &[u8; 4] = b"HARG";
pub const STORE_VERSION: u16 = 1;

/// A parsed chunk store: the GSE layout shared by every GSE-8 chunk plus the
/// compressed chunks in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChunkStore {
    pub layout: GseLayout,
    pub chunks: Vec<CompressedChunk>,
}

fn scheme_tag(scheme: Scheme) -> u8 {
    scheme as u8
}

fn scheme_from_tag(tag: u8) -> Option<Scheme> {
    Scheme::ALL.get(tag as usize).copied()
}

pub fn write_store(
    out: &mut impl Write,
    layout: GseLayout,
    chunks: &[CompressedChunk],
) -> Result<(), FormatError> {
    write_store_header(out, layout, chunks.len() as u32)?;
    for chunk in chunks {
        write_store_chunk(out, chunk)?;
    }
    Ok(())
}

pub fn write_store_header(
    out: &mut impl Write,
    layout: GseLayout,
    chunk_count: u32,
) -> Result<(), FormatError> {
    out.write_all(STORE_MAGIC)?;
    out.write_all(&STORE_VERSION.to_le_bytes())?;
    out.write_all(&chunk_count.to_le_bytes())?;
    out.write_all(&[layout.e_bits(), layout.m_bits()])?;
    Ok(())
}

/// Appends one record; used by the streaming compressor after the header is
/// in place.
pub fn write_store_chunk(out: &mut impl Write, chunk: &CompressedChunk) -> Result<(), FormatError> {
    out.write_all(&chunk.id.to_le_bytes())?;
    out.write_all(&[chunk.kind as u8, scheme_tag(chunk.scheme)])?;
    out.write_all(&chunk.token_count.to_le_bytes())?;
    out.write_all(&chunk.width.to_le_bytes())?;
    match &chunk.meta {
        SchemeMeta::None => {}
        SchemeMeta::Int8 { scale } => out.write_all(&scale.to_le_bytes())?,
        SchemeMeta::Gse8 { array, .. } => {
            out.write_all(&[array.step, array.exponents.len() as u8])?;
            out.write_all(&array.exponents.iter().map(|&e| e as u8).collect::<Vec<u8>>())?;
        }
    }
    out.write_all(&chunk.payload)?;
    Ok(())
}

pub fn read_store(bytes: &[u8]) -> Result<ChunkStore, FormatError> {
    let mut r = Reader::new(bytes);
    if r.take(4).map_err(|_| FormatError::BadMagic { expected: "HARG" })? != STORE_MAGIC {
        return Err(FormatError::BadMagic { expected: "HARG" });
    }
    let version = r.u16()?;
    if version != STORE_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let chunk_count = r.u32()?;
    let e_bits = r.u8()?;
    let m_bits = r.u8()?;
    let layout = GseLayout::new(e_bits, m_bits)
        .map_err(|e| r.invalid(format!("bad GSE layout in header: {e}")))?;
    let mut chunks = Vec::new();
    for _ in 0..chunk_count {
        chunks.push(read_chunk(&mut r, layout)?);
    }
    if !r.is_empty() {
        return Err(r.invalid(format!("{} trailing bytes after last chunk", r.remaining())));
    }
    Ok(ChunkStore { layout, chunks })
}

fn read_chunk(r: &mut Reader, layout: GseLayout) -> Result<CompressedChunk, FormatError> {
    let id = r.u32()?;
    let kind = match r.u8()? {
        0 => ChunkKind::Key,
        1 => ChunkKind::Value,
        k => return Err(r.invalid(format!("unknown chunk kind {k}"))),
    };
    let scheme_byte = r.u8()?;
    let scheme =
        scheme_from_tag(scheme_byte).ok_or_else(|| r.invalid(format!("unknown scheme tag {scheme_byte}")))?;
    let token_count = r.u32()?;
    let width = r.u32()?;
    let meta = match scheme {
        Scheme::Fp8E4M3 | Scheme::Fp8E5M2 => SchemeMeta::None,
        Scheme::Int8 => {
            let scale = r.f32()?;
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(r.invalid(format!("int8 scale must be positive, got {scale}")));
            }
            SchemeMeta::Int8 { scale }
        }
        Scheme::Gse8 => {
            let step = r.u8()?;
            let len = r.u8()? as usize;
            if len > 1 << layout.e_bits() {
                return Err(r.invalid(format!("GSE array of {len} exceeds the index range")));
            }
            let mut exponents = Vec::with_capacity(len);
            for _ in 0..len {
                exponents.push(r.i8()?);
            }
            if exponents.windows(2).any(|w| w[0] >= w[1]) {
                return Err(r.invalid("GSE exponents must be strictly ascending"));
            }
            SchemeMeta::Gse8 { layout, array: GseArray { exponents, step } }
        }
    };
    let elements = checked_elements(r, token_count, width, 1)?;
    let payload = r.take(elements)?.to_vec();
    Ok(CompressedChunk { id, kind, scheme, token_count, width, payload, meta })
}
