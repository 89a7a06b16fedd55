//! Synthetic corpus generation: one Key and one Value chunk per document,
//! bell-shaped values clipped inside the ranges real KV chunks occupy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::bf16::Bf16;
use crate::chunk::{ChunkKind, KvChunk};

/// Key values stay strictly inside (−25, 25); the clip bound is exactly
/// representable in BF16 so rounding cannot cross it.
pub const KEY_CLIP: f64 = 24.75;
pub const KEY_SIGMA: f64 = 5.0;
/// Value chunks stay strictly inside (−10, 10).
pub const VALUE_CLIP: f64 = 9.9375;
pub const VALUE_SIGMA: f64 = 2.0;

/// Generates `2 * n_docs` chunks with ids `0..2*n_docs`, alternating
/// Key/Value per document. Deterministic in `seed`.
pub fn gen_corpus(n_docs: u32, tokens_per_chunk: u32, width: u32, seed: u64) -> Vec<KvChunk> {
    assert!(n_docs >= 1 && tokens_per_chunk >= 1 && width >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key_dist = Normal::new(0.0, KEY_SIGMA).unwrap();
    let value_dist = Normal::new(0.0, VALUE_SIGMA).unwrap();
    let elements = tokens_per_chunk as usize * width as usize;
    let mut chunks = Vec::with_capacity(2 * n_docs as usize);
    for doc in 0..n_docs {
        for (offset, kind, dist, clip) in
            [(0, ChunkKind::Key, &key_dist, KEY_CLIP), (1, ChunkKind::Value, &value_dist, VALUE_CLIP)]
        {
            let data: Vec<Bf16> = (0..elements)
                .map(|_| {
                    let x = dist.sample(&mut rng).clamp(-clip, clip);
                    Bf16::from_f64(x).expect("clipped sample is finite and in range")
                })
                .collect();
            let chunk = KvChunk::new(2 * doc + offset, kind, tokens_per_chunk, width, data)
                .expect("generated chunk is well formed");
            chunks.push(chunk);
        }
    }
    chunks
}
