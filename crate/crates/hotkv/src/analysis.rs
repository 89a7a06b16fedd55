//! Numerical-characteristics statistics over KV chunks: value ranges,
//! exponent histograms with top-k coverage, and the RMSE error metric.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::chunk::{ChunkKind, KvChunk};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("rmse requires equal lengths, got {0} and {1}")]
    LengthMismatch(usize, usize),
}

/// Min/max of a chunk's decoded values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSummary {
    pub min: f64,
    pub max: f64,
    pub kind: ChunkKind,
}

/// Occurrence counts of unbiased exponents over the nonzero elements of a
/// chunk. Zeros have no meaningful exponent and are excluded; subnormals
/// count under −126.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExponentHistogram {
    counts: BTreeMap<i32, u64>,
    total_nonzero: u64,
}

impl ExponentHistogram {
    pub fn counts(&self) -> &BTreeMap<i32, u64> {
        &self.counts
    }

    pub fn total_nonzero(&self) -> u64 {
        self.total_nonzero
    }

    pub fn distinct_exponents(&self) -> usize {
        self.counts.len()
    }
}

/// Exact min/max over the chunk's elements.
pub fn value_range(chunk: &KvChunk) -> RangeSummary {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for x in chunk.values() {
        min = min.min(x);
        max = max.max(x);
    }
    RangeSummary { min, max, kind: chunk.kind() }
}

pub fn exponent_histogram(chunk: &KvChunk) -> ExponentHistogram {
    let mut h = ExponentHistogram::default();
    for v in chunk.data() {
        if v.is_zero() {
            continue;
        }
        *h.counts.entry(v.repr_exponent()).or_insert(0) += 1;
        h.total_nonzero += 1;
    }
    h
}

/// Fraction of nonzero elements covered by the `k` most frequent exponents.
/// Count ties break toward the smaller exponent so reports are deterministic.
pub fn topk_coverage(h: &ExponentHistogram, k: usize) -> f64 {
    assert!(k >= 1, "top-k coverage needs k >= 1");
    if h.total_nonzero == 0 {
        return 0.0;
    }
    let mut entries: Vec<(i32, u64)> = h.counts.iter().map(|(&e, &c)| (e, c)).collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let covered: u64 = entries.iter().take(k).map(|&(_, c)| c).sum();
    covered as f64 / h.total_nonzero as f64
}

/// Root-mean-square error between two equally sized chunks, accumulated in
/// f64 regardless of chunk size.
pub fn rmse(original: &KvChunk, reconstructed: &KvChunk) -> Result<f64, AnalysisError> {
    if original.len() != reconstructed.len() {
        return Err(AnalysisError::LengthMismatch(original.len(), reconstructed.len()));
    }
    let sum_sq: f64 = original
        .values()
        .zip(reconstructed.values())
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum();
    Ok((sum_sq / original.len() as f64).sqrt())
}
