//! Symmetric per-chunk INT8 quantization.
//!
//! `scale = max|x| / 127`, elements quantize to `round_ties_even(x / scale)`
//! clamped to `[-127, 127]`; the byte −128 is never produced.

use crate::bf16::Bf16;
use crate::chunk::{KvChunk, Scheme};
use crate::codec::{expect_scheme, CodecError, CompressedChunk, SchemeMeta};

pub(crate) fn encode(chunk: &KvChunk) -> CompressedChunk {
    let max_abs = chunk.values().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if max_abs == 0.0 { 1.0f32 } else { (max_abs / 127.0) as f32 };
    let s = scale as f64;
    let payload = chunk
        .data()
        .iter()
        .map(|v| {
            let q = (v.to_f64() / s).round_ties_even().clamp(-127.0, 127.0);
            q as i8 as u8
        })
        .collect();
    CompressedChunk {
        id: chunk.id(),
        kind: chunk.kind(),
        scheme: Scheme::Int8,
        token_count: chunk.token_count(),
        width: chunk.width(),
        payload,
        meta: SchemeMeta::Int8 { scale },
    }
}

pub(crate) fn decode(c: &CompressedChunk) -> Result<KvChunk, CodecError> {
    expect_scheme(c, |s| s == Scheme::Int8, "int8")?;
    let scale = match c.meta {
        SchemeMeta::Int8 { scale } => scale,
        _ => return Err(CodecError::CorruptPayload("int8 chunk without scale".into())),
    };
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CodecError::CorruptPayload(format!("non-positive int8 scale {scale}")));
    }
    let s = scale as f64;
    let data = c
        .payload
        .iter()
        .map(|&b| {
            Bf16::from_f64(b as i8 as f64 * s)
                .map_err(|_| CodecError::CorruptPayload(format!("int8 scale {scale} overflows")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KvChunk::new(c.id, c.kind, c.token_count, c.width, data)?)
}
