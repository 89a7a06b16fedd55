//! Hotness-aware mixed-precision compression and tiered placement for
//! precomputed KV chunks, with a deterministic cost simulator.
//!
//! The pipeline: generate or import a BF16 corpus, measure per-chunk access
//! frequency over a retrieval workload, compress each chunk with the 8-bit
//! scheme its hotness rank earns (INT8 for the hottest, then FP8 E4M3, FP8
//! E5M2, and GSE-8 for the cold tail), pin the hottest chunks in the faster
//! tiers of a GPU/pinned/pageable/disk hierarchy, and replay workloads
//! through a cost model to compare against an uncompressed always-from-disk
//! baseline.

pub mod analysis;
pub mod bf16;
pub mod chunk;
pub mod cli;
pub mod codec;
pub mod config;
pub mod hotness;
pub mod placement;
pub mod sim;
pub mod store;

pub use bf16::Bf16;
pub use chunk::{ChunkKind, KvChunk, Scheme};
pub use codec::{compress, decompress, CompressedChunk, GseLayout};
pub use config::RunConfig;
pub use hotness::{partition_by_hotness, sort_by_frequency, AccessProfile, HotnessPartition};
pub use placement::{build_lists, AccessOutcome, Link, PlacementState, Tier, TierListAssignment};
pub use sim::{gen_corpus, gen_workload, profile_from_workload, query_latency, CostModel, SimReport, Workload};
