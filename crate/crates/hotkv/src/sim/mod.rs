//! Deterministic cost simulator: replays a workload through the placement
//! state machine and prices every access against a configurable transfer and
//! decode cost model, alongside an always-from-disk BF16 baseline.

mod corpus;
mod workload;

pub use corpus::{gen_corpus, KEY_CLIP, KEY_SIGMA, VALUE_CLIP, VALUE_SIGMA};
pub use workload::{gen_workload, profile_from_workload, Workload};

use thiserror::Error;

use crate::chunk::Scheme;
use crate::codec::CompressedChunk;
use crate::hotness::HotnessError;
use crate::placement::{build_lists, AccessOutcome, Link, PlacementError, PlacementState, Tier};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Hotness(#[from] HotnessError),
    #[error("workload queries an empty corpus")]
    EmptyCorpus,
}

/// Per-link bandwidths and fixed latencies plus per-scheme decode rates.
/// All values are invented defaults, overridable from config; only the
/// orderings matter (decode: GSE-8 fastest, then INT8, then the FP8 pair).
#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    /// Bytes per second for disk→pageable, pageable→pinned, pinned→GPU.
    pub link_bandwidth: [f64; 3],
    /// Fixed seconds per transfer on each link.
    pub link_latency: [f64; 3],
    /// Decode bytes per second, indexed in `Scheme` order.
    pub decode_rate: [f64; 4],
    /// Seconds charged for a GPU-resident access.
    pub gpu_access_time: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            link_bandwidth: [2.0e9, 10.0e9, 25.0e9],
            link_latency: [50.0e-6; 3],
            // Int8, Fp8E4M3, Fp8E5M2, Gse8
            decode_rate: [20.0e9, 8.0e9, 10.0e9, 24.0e9],
            gpu_access_time: 1.0e-6,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), String> {
        if self.link_bandwidth.iter().chain(&self.decode_rate).any(|&b| b <= 0.0 || !b.is_finite()) {
            return Err("bandwidths and decode rates must be positive".into());
        }
        if self.link_latency.iter().any(|&l| l < 0.0) || self.gpu_access_time < 0.0 {
            return Err("latencies must be non-negative".into());
        }
        Ok(())
    }

    pub fn transfer_cost(&self, link: Link, bytes: u64) -> f64 {
        let i = link.index();
        self.link_latency[i] + bytes as f64 / self.link_bandwidth[i]
    }

    /// Full three-leg disk path for `bytes`, with no decode: the baseline.
    pub fn full_path_cost(&self, bytes: u64) -> f64 {
        Link::ALL.iter().map(|&l| self.transfer_cost(l, bytes)).sum()
    }

    fn decode_cost(&self, scheme: Option<Scheme>, bytes: u64) -> f64 {
        match scheme {
            Some(s) => bytes as f64 / self.decode_rate[s as usize],
            None => 0.0,
        }
    }

    /// Cost of one chunk access: a GPU hit charges the fixed access time;
    /// anything else pays latency plus bytes/bandwidth per transfer leg and
    /// one decode of the compressed payload.
    pub fn access_cost(&self, outcome: &AccessOutcome, scheme: Option<Scheme>, bytes: u64) -> f64 {
        if outcome.hit_tier == Tier::Gpu {
            return self.gpu_access_time;
        }
        let transfers: f64 = outcome.transfers.iter().map(|&(l, b)| self.transfer_cost(l, b)).sum();
        transfers + self.decode_cost(scheme, bytes)
    }
}

/// Latency of one query: the sum of its per-chunk access costs.
pub fn query_latency(
    model: &CostModel,
    accesses: impl IntoIterator<Item = (AccessOutcome, Option<Scheme>, u64)>,
) -> f64 {
    accesses.into_iter().map(|(o, s, b)| model.access_cost(&o, s, b)).sum()
}

/// The simulator's view of one chunk: how many bytes move per transfer leg
/// and what decode work arrival implies. `scheme == None` models raw BF16.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChunkCost {
    pub id: u32,
    pub scheme: Option<Scheme>,
    pub compressed_bytes: u64,
    pub raw_bytes: u64,
}

impl ChunkCost {
    pub fn from_compressed(c: &CompressedChunk) -> Self {
        ChunkCost {
            id: c.id,
            scheme: Some(c.scheme),
            compressed_bytes: c.compressed_bytes(),
            raw_bytes: c.raw_bytes(),
        }
    }

    /// Uncompressed variant of the same chunk (for placement-only arms).
    pub fn as_bf16(self) -> Self {
        ChunkCost { id: self.id, scheme: None, compressed_bytes: self.raw_bytes, raw_bytes: self.raw_bytes }
    }
}

/// Everything one simulation run needs.
#[derive(Debug, Clone)]
pub struct SimInputs<'a> {
    pub costs: &'a [ChunkCost],
    /// Chunk ids in descending hotness, shared with the compression partition.
    pub sorted_ids: &'a [u32],
    pub tau_gpu: f64,
    pub tau_pin: f64,
    pub tau_page: f64,
    pub workload: &'a Workload,
    pub model: &'a CostModel,
}

/// Arms of the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AblationMode {
    /// Compression active, all residency queues disabled.
    MpOnly,
    /// Placement without the pinned tier, raw BF16 payloads.
    DpNoPin,
    /// Only the pinned tier, raw BF16 payloads.
    DpPinOnly,
    /// Full placement, raw BF16 payloads.
    DpOnly,
    /// Compression and full placement.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryRow {
    pub query_idx: u32,
    pub ha_latency: f64,
    pub baseline_latency: f64,
    pub speedup: f64,
    /// Hits within this query: GPU, pinned, pageable, disk.
    pub hits: [u64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSummary {
    pub mean_speedup: f64,
    pub max_speedup: f64,
    pub first_half_mean_speedup: f64,
    pub second_half_mean_speedup: f64,
    pub mean_ha_latency: f64,
    pub mean_baseline_latency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub rows: Vec<QueryRow>,
    /// Cumulative hits per tier over the whole run.
    pub tier_hits: [u64; 4],
    /// Total bytes moved per link by the placement configuration.
    pub link_bytes: [u64; 3],
    pub summary: SimSummary,
}

fn tier_index(tier: Tier) -> usize {
    match tier {
        Tier::Gpu => 0,
        Tier::Pin => 1,
        Tier::Page => 2,
        Tier::Disk => 3,
    }
}

/// Replays the workload under the full configuration.
pub fn run(inputs: &SimInputs) -> Result<SimReport, SimError> {
    run_arm(inputs, AblationMode::Full)
}

/// Replays the workload under one ablation arm.
pub fn run_arm(inputs: &SimInputs, mode: AblationMode) -> Result<SimReport, SimError> {
    if inputs.costs.is_empty() {
        return Err(SimError::EmptyCorpus);
    }
    let compressed = matches!(mode, AblationMode::MpOnly | AblationMode::Full);
    let costs: Vec<ChunkCost> =
        inputs.costs.iter().map(|&c| if compressed { c } else { c.as_bf16() }).collect();
    let (tau_gpu, tau_pin, tau_page) = match mode {
        AblationMode::MpOnly => (0.0, 0.0, 0.0),
        AblationMode::DpNoPin => (inputs.tau_gpu, 0.0, inputs.tau_page),
        AblationMode::DpPinOnly => (0.0, inputs.tau_pin, 0.0),
        AblationMode::DpOnly | AblationMode::Full => (inputs.tau_gpu, inputs.tau_pin, inputs.tau_page),
    };
    let lists = build_lists(inputs.sorted_ids, tau_gpu, tau_pin, tau_page)?;
    let mut state =
        PlacementState::new(lists, costs.iter().map(|c| (c.id, c.compressed_bytes)));
    let by_id: std::collections::HashMap<u32, ChunkCost> =
        costs.iter().map(|c| (c.id, *c)).collect();

    let mut rows = Vec::with_capacity(inputs.workload.queries.len());
    let mut tier_hits = [0u64; 4];
    let mut link_bytes = [0u64; 3];
    for (query_idx, query) in inputs.workload.queries.iter().enumerate() {
        let mut ha = 0.0;
        let mut baseline = 0.0;
        let mut hits = [0u64; 4];
        for &id in query {
            let cost = by_id.get(&id).copied().ok_or(PlacementError::UnknownId(id))?;
            let outcome = state.access(id)?;
            hits[tier_index(outcome.hit_tier)] += 1;
            for &(link, bytes) in &outcome.transfers {
                link_bytes[link.index()] += bytes;
            }
            ha += inputs.model.access_cost(&outcome, cost.scheme, cost.compressed_bytes);
            baseline += inputs.model.full_path_cost(cost.raw_bytes);
        }
        for (t, h) in hits.iter().enumerate() {
            tier_hits[t] += h;
        }
        rows.push(QueryRow {
            query_idx: query_idx as u32,
            ha_latency: ha,
            baseline_latency: baseline,
            speedup: baseline / ha,
            hits,
        });
    }
    let summary = summarize(&rows);
    Ok(SimReport { rows, tier_hits, link_bytes, summary })
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0u64);
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn summarize(rows: &[QueryRow]) -> SimSummary {
    let half = rows.len() / 2;
    SimSummary {
        mean_speedup: mean(rows.iter().map(|r| r.speedup)),
        max_speedup: rows.iter().map(|r| r.speedup).fold(0.0, f64::max),
        first_half_mean_speedup: mean(rows[..half].iter().map(|r| r.speedup)),
        second_half_mean_speedup: mean(rows[half..].iter().map(|r| r.speedup)),
        mean_ha_latency: mean(rows.iter().map(|r| r.ha_latency)),
        mean_baseline_latency: mean(rows.iter().map(|r| r.baseline_latency)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn costs(n: u32, bytes: u64) -> Vec<ChunkCost> {
        (0..n)
            .map(|id| ChunkCost {
                id,
                scheme: Some(Scheme::Int8),
                compressed_bytes: bytes,
                raw_bytes: bytes * 2,
            })
            .collect()
    }

    fn fixed_workload(queries: Vec<Vec<u32>>) -> Workload {
        let k = queries.first().map_or(1, |q| q.len());
        Workload { queries, seed: 0, zipf_s: 1.0, k }
    }

    #[test]
    fn all_gpu_hit_query_costs_k_access_times() {
        let model = CostModel::default();
        let costs = costs(4, 1000);
        let sorted: Vec<u32> = (0..4).collect();
        let workload = fixed_workload(vec![vec![0, 1], vec![0, 1], vec![0, 1]]);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &sorted,
            tau_gpu: 0.5,
            tau_pin: 0.25,
            tau_page: 0.25,
            workload: &workload,
            model: &model,
        };
        let report = run(&inputs).unwrap();
        // First query loads from disk; afterwards both ids are GPU hits.
        assert_eq!(report.rows[0].hits, [0, 0, 0, 2]);
        for row in &report.rows[1..] {
            assert_eq!(row.hits, [2, 0, 0, 0]);
            assert!((row.ha_latency - 2.0 * model.gpu_access_time).abs() < 1e-15);
            assert!(row.speedup > report.rows[0].speedup);
        }
    }

    #[test]
    fn single_disk_load_matches_formula() {
        let model = CostModel::default();
        let bytes = 4096u64;
        let costs = vec![ChunkCost {
            id: 0,
            scheme: Some(Scheme::Gse8),
            compressed_bytes: bytes,
            raw_bytes: bytes * 2,
        }];
        let workload = fixed_workload(vec![vec![0]]);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &[0],
            tau_gpu: 0.0,
            tau_pin: 0.0,
            tau_page: 0.0,
            workload: &workload,
            model: &model,
        };
        let report = run(&inputs).unwrap();
        let expected: f64 = (0..3)
            .map(|i| model.link_latency[i] + bytes as f64 / model.link_bandwidth[i])
            .sum::<f64>()
            + bytes as f64 / model.decode_rate[Scheme::Gse8 as usize];
        assert!((report.rows[0].ha_latency - expected).abs() < 1e-15);
        assert_eq!(report.link_bytes, [bytes; 3]);
    }

    #[test]
    fn query_latency_sums_access_costs() {
        let model = CostModel::default();
        let gpu_hit = AccessOutcome { hit_tier: Tier::Gpu, transfers: vec![], evictions: vec![] };
        let disk = AccessOutcome {
            hit_tier: Tier::Disk,
            transfers: Link::ALL.iter().map(|&l| (l, 1024)).collect(),
            evictions: vec![],
        };
        let total = query_latency(
            &model,
            [(gpu_hit, Some(Scheme::Int8), 1024), (disk, Some(Scheme::Int8), 1024)],
        );
        let expected = model.gpu_access_time
            + model.full_path_cost(1024)
            + 1024.0 / model.decode_rate[Scheme::Int8 as usize];
        assert!((total - expected).abs() < 1e-15);
    }

    #[test]
    fn halving_bytes_reduces_transfer_latency() {
        let model = CostModel::default();
        assert!(model.full_path_cost(1000) < model.full_path_cost(2000));
        assert!(model.transfer_cost(Link::DiskToPage, 500) < model.transfer_cost(Link::DiskToPage, 1000));
    }

    #[test]
    fn accounting_sums_to_query_count_times_k() {
        let costs = costs(16, 256);
        let ids: Vec<u32> = (0..16).collect();
        let workload = gen_workload(&ids, 100, 3, 1.1, 5);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &ids,
            tau_gpu: 0.2,
            tau_pin: 0.2,
            tau_page: 0.2,
            workload: &workload,
            model: &CostModel::default(),
        };
        let report = run(&inputs).unwrap();
        assert_eq!(report.tier_hits.iter().sum::<u64>(), 300);
        for row in &report.rows {
            assert_eq!(row.hits.iter().sum::<u64>(), 3);
            assert!(row.speedup > 0.0);
        }
    }

    #[test]
    fn baseline_is_history_independent() {
        let costs = costs(8, 512);
        let ids: Vec<u32> = (0..8).collect();
        let workload = fixed_workload(vec![vec![1, 2], vec![1, 2], vec![1, 2]]);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &ids,
            tau_gpu: 0.5,
            tau_pin: 0.25,
            tau_page: 0.25,
            workload: &workload,
            model: &CostModel::default(),
        };
        let report = run(&inputs).unwrap();
        let first = report.rows[0].baseline_latency;
        assert!(report.rows.iter().all(|r| r.baseline_latency == first));
    }

    #[test]
    fn zero_taus_and_no_compression_degenerate_to_baseline() {
        let costs = costs(4, 2048);
        let ids: Vec<u32> = (0..4).collect();
        let workload = gen_workload(&ids, 50, 2, 1.1, 9);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &ids,
            tau_gpu: 0.0,
            tau_pin: 0.0,
            tau_page: 0.0,
            workload: &workload,
            model: &CostModel::default(),
        };
        let report = run_arm(&inputs, AblationMode::DpOnly).unwrap();
        assert!(report.rows.iter().all(|r| r.speedup == 1.0));
        assert_eq!(report.summary.mean_speedup, 1.0);
    }

    #[test]
    fn mp_only_beats_baseline_whenever_compression_shrinks_bytes() {
        let costs = costs(4, 2048);
        let ids: Vec<u32> = (0..4).collect();
        let workload = gen_workload(&ids, 50, 2, 1.1, 9);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &ids,
            tau_gpu: 0.25,
            tau_pin: 0.25,
            tau_page: 0.25,
            workload: &workload,
            model: &CostModel::default(),
        };
        let mp = run_arm(&inputs, AblationMode::MpOnly).unwrap();
        assert!(mp.rows.iter().all(|r| r.speedup > 1.0));
        // Queues stay disabled: every access is a disk load.
        assert_eq!(mp.tier_hits, [0, 0, 0, 100]);
        let full = run_arm(&inputs, AblationMode::Full).unwrap();
        assert!(full.summary.mean_speedup >= mp.summary.mean_speedup);
    }

    #[test]
    fn determinism_across_runs() {
        let costs = costs(32, 300);
        let ids: Vec<u32> = (0..32).collect();
        let workload = gen_workload(&ids, 200, 4, 1.1, 33);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &ids,
            tau_gpu: 0.1,
            tau_pin: 0.1,
            tau_page: 0.1,
            workload: &workload,
            model: &CostModel::default(),
        };
        assert_eq!(run(&inputs).unwrap(), run(&inputs).unwrap());
    }

    #[test]
    fn repeated_trace_gpu_hits_do_not_decrease() {
        let costs = costs(12, 700);
        let ids: Vec<u32> = (0..12).collect();
        let trace: Vec<Vec<u32>> = vec![vec![0, 5], vec![3, 1], vec![0, 2], vec![7, 0]];
        let mut twice = trace.clone();
        twice.extend(trace.clone());
        let workload = fixed_workload(twice);
        let inputs = SimInputs {
            costs: &costs,
            sorted_ids: &ids,
            tau_gpu: 0.25,
            tau_pin: 0.25,
            tau_page: 0.25,
            workload: &workload,
            model: &CostModel::default(),
        };
        let report = run(&inputs).unwrap();
        let first_pass: u64 = report.rows[..4].iter().map(|r| r.hits[0]).sum();
        let second_pass: u64 = report.rows[4..].iter().map(|r| r.hits[0]).sum();
        assert!(second_pass >= first_pass);
    }
}
