//! Deterministic Zipf-skewed retrieval workloads and the access profiles
//! they induce.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hotness::AccessProfile;

/// An ordered list of queries, each naming `k` distinct chunk ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub queries: Vec<Vec<u32>>,
    pub seed: u64,
    pub zipf_s: f64,
    pub k: usize,
}

/// Inverse-CDF sampler over ranks `0..n` with weights `(rank+1)^-s`.
/// `s = 0` degenerates to the uniform distribution.
struct ZipfRanks {
    cumulative: Vec<f64>,
}

impl ZipfRanks {
    fn new(n: usize, s: f64) -> Self {
        assert!(n >= 1 && s >= 0.0 && s.is_finite());
        let mut cumulative = Vec::with_capacity(n);
        let mut total = 0.0;
        for rank in 1..=n {
            total += (rank as f64).powf(-s);
            cumulative.push(total);
        }
        for c in &mut cumulative {
            *c /= total;
        }
        ZipfRanks { cumulative }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1)
    }
}

/// Builds a workload of `query_count` queries over `ids`. Ranks follow a
/// Zipf(`zipf_s`) distribution mapped through a seed-fixed permutation of the
/// ids; each query holds `k` distinct ids.
pub fn gen_workload(ids: &[u32], query_count: usize, k: usize, zipf_s: f64, seed: u64) -> Workload {
    assert!(k >= 1 && k <= ids.len(), "k must satisfy 1 <= k <= {}", ids.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut permuted = ids.to_vec();
    permuted.sort_unstable();
    permuted.shuffle(&mut rng);
    let zipf = ZipfRanks::new(permuted.len(), zipf_s);
    let queries = (0..query_count)
        .map(|_| {
            if k == permuted.len() {
                return permuted.clone();
            }
            let mut picked: Vec<u32> = Vec::with_capacity(k);
            while picked.len() < k {
                let id = permuted[zipf.sample(&mut rng)];
                if !picked.contains(&id) {
                    picked.push(id);
                }
            }
            picked
        })
        .collect();
    Workload { queries, seed, zipf_s, k }
}

/// Counts, per id, the number of queries naming it.
pub fn profile_from_workload(workload: &Workload) -> AccessProfile {
    let mut profile = AccessProfile::new();
    for query in &workload.queries {
        for &id in query {
            profile.record(id);
        }
    }
    profile
}
