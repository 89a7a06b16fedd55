//! Access-frequency profiling and hotness-aware scheme assignment: sort
//! chunks by access count, cut the sorted order at three thresholds, and give
//! each group one compression scheme, hottest first.

use std::collections::HashMap;

use thiserror::Error;

use crate::chunk::{KvChunk, Scheme};
use crate::codec::{compress, CompressedChunk, GseLayout};

#[derive(Debug, Error, PartialEq)]
pub enum HotnessError {
    #[error("threshold fractions must lie in [0,1] and sum to at most 1, got {0:?}")]
    InvalidFractions([f64; 3]),
    #[error("chunk id {0} missing from the partition")]
    UnassignedId(u32),
}

/// Per-chunk access counts. Ids absent from the map count as zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessProfile {
    counts: HashMap<u32, u64>,
}

impl AccessProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (u32, u64)>) -> Self {
        AccessProfile { counts: counts.into_iter().collect() }
    }

    pub fn record(&mut self, id: u32) {
        *self.counts.entry(id).or_insert(0) += 1;
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts.get(&id).copied().unwrap_or(0)
    }

    /// Whether the profile explicitly lists `id` (a zero count still counts
    /// as listed).
    pub fn contains(&self, id: u32) -> bool {
        self.counts.contains_key(&id)
    }

    /// Ensures every corpus id has an entry; ids only seen here keep count 0.
    pub fn cover_ids(&mut self, ids: impl IntoIterator<Item = u32>) {
        for id in ids {
            self.counts.entry(id).or_insert(0);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts.iter().map(|(&id, &c)| (id, c))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Ids in descending access-count order; ties break toward the smaller id so
/// runs reproduce exactly.
pub fn sort_by_frequency(profile: &AccessProfile) -> Vec<u32> {
    let mut ids: Vec<(u32, u64)> = profile.iter().collect();
    ids.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ids.into_iter().map(|(id, _)| id).collect()
}

/// The thresholded grouping: four id groups in hotness order plus the
/// id → scheme assignment they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct HotnessPartition {
    sorted_ids: Vec<u32>,
    taus: [f64; 3],
    groups: [Vec<u32>; 4],
    assignment: HashMap<u32, Scheme>,
}

impl HotnessPartition {
    pub fn sorted_ids(&self) -> &[u32] {
        &self.sorted_ids
    }

    pub fn groups(&self) -> &[Vec<u32>; 4] {
        &self.groups
    }

    pub fn group_sizes(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|i| self.groups[i].len())
    }

    pub fn scheme_for(&self, id: u32) -> Option<Scheme> {
        self.assignment.get(&id).copied()
    }
}

/// Cuts the sorted order at `floor(tau_i * N)` boundaries; the remainder past
/// the third cut forms the coldest group.
pub fn partition(sorted: Vec<u32>, taus: [f64; 3]) -> Result<HotnessPartition, HotnessError> {
    if taus.iter().any(|t| !(0.0..=1.0).contains(t) || !t.is_finite()) || taus.iter().sum::<f64>() > 1.0 {
        return Err(HotnessError::InvalidFractions(taus));
    }
    let n = sorted.len();
    let idx1 = (taus[0] * n as f64).floor() as usize;
    let idx2 = idx1 + (taus[1] * n as f64).floor() as usize;
    let idx3 = idx2 + (taus[2] * n as f64).floor() as usize;
    let groups = [
        sorted[..idx1].to_vec(),
        sorted[idx1..idx2].to_vec(),
        sorted[idx2..idx3].to_vec(),
        sorted[idx3..].to_vec(),
    ];
    let mut assignment = HashMap::with_capacity(n);
    for (group, scheme) in groups.iter().zip(Scheme::ALL) {
        for &id in group {
            assignment.insert(id, scheme);
        }
    }
    Ok(HotnessPartition { sorted_ids: sorted, taus, groups, assignment })
}

/// Convenience: profile → sorted → partition.
pub fn partition_by_hotness(
    profile: &AccessProfile,
    taus: [f64; 3],
) -> Result<HotnessPartition, HotnessError> {
    partition(sort_by_frequency(profile), taus)
}

/// Compresses every chunk with its assigned scheme, preserving input order.
pub fn compress_corpus(
    chunks: &[KvChunk],
    partition: &HotnessPartition,
    layout: GseLayout,
) -> Result<Vec<CompressedChunk>, HotnessError> {
    chunks
        .iter()
        .map(|chunk| {
            let scheme =
                partition.scheme_for(chunk.id()).ok_or(HotnessError::UnassignedId(chunk.id()))?;
            Ok(compress(chunk, scheme, layout))
        })
        .collect()
}
