#![no_main]
use libfuzzer_sys::fuzz_target;

use hotkv::codec::{CompressedChunk, GseArray, GseLayout, SchemeMeta};
use hotkv::{ChunkKind, Scheme};

// Hammers the per-scheme decoders with metadata the store parser would have
// rejected: unsorted exponent arrays, NaN scales, out-of-range indices.
fuzz_target!(|data: &[u8]| {
    let mut it = data.iter().copied();
    let Some(tag) = it.next() else { return };
    let scheme = Scheme::ALL[tag as usize % 4];
    let meta = match scheme {
        Scheme::Int8 => {
            let mut raw = [0u8; 4];
            for b in &mut raw {
                let Some(v) = it.next() else { return };
                *b = v;
            }
            SchemeMeta::Int8 { scale: f32::from_le_bytes(raw) }
        }
        Scheme::Fp8E4M3 | Scheme::Fp8E5M2 => SchemeMeta::None,
        Scheme::Gse8 => {
            let Some(sel) = it.next() else { return };
            let (e_bits, m_bits) = [(2, 5), (3, 4), (4, 3), (5, 2)][sel as usize % 4];
            let Some(len) = it.next() else { return };
            let exponents: Vec<i8> = (&mut it).take(len as usize % 33).map(|b| b as i8).collect();
            SchemeMeta::Gse8 {
                layout: GseLayout::new(e_bits, m_bits).unwrap(),
                array: GseArray { exponents, step: m_bits.max(2) - 1 },
            }
        }
    };
    let payload: Vec<u8> = it.collect();
    let chunk = CompressedChunk {
        id: 0,
        kind: ChunkKind::Value,
        scheme,
        token_count: 1,
        width: payload.len() as u32,
        payload,
        meta,
    };
    // Corrupt inputs must come back as errors, never as panics.
    let _ = hotkv::decompress(&chunk);
});
