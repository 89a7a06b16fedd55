//! Hotness-aware placement: the four-tier residency state machine.
//!
//! Hotness rank statically assigns every chunk to one of four tier lists
//! (GPU / pinned / pageable / disk). Three LRU queues track what currently
//! resides in the cached tiers; an access walks the tiers top-down, promotes
//! the chunk into the queues its lists allow, and reports the transfers the
//! hit tier implies. Disk-list chunks are never cached.

use std::collections::HashMap;

use thiserror::Error;

use crate::hotness::HotnessError;

/// Memory tiers, fastest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    Gpu,
    Pin,
    Page,
    Disk,
}

/// Transfer legs between adjacent tiers, in the order data flows toward the GPU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    DiskToPage,
    PageToPin,
    PinToGpu,
}

impl Link {
    pub const ALL: [Link; 3] = [Link::DiskToPage, Link::PageToPin, Link::PinToGpu];

    pub fn index(self) -> usize {
        match self {
            Link::DiskToPage => 0,
            Link::PageToPin => 1,
            Link::PinToGpu => 2,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlacementError {
    #[error("unknown chunk id {0}")]
    UnknownId(u32),
}

/// Static tier lists: disjoint slices of the hotness-sorted id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TierListAssignment {
    gpu: Vec<u32>,
    pin: Vec<u32>,
    page: Vec<u32>,
    disk: Vec<u32>,
}

impl TierListAssignment {
    pub fn gpu_list(&self) -> &[u32] {
        &self.gpu
    }

    pub fn pin_list(&self) -> &[u32] {
        &self.pin
    }

    pub fn page_list(&self) -> &[u32] {
        &self.page
    }

    pub fn disk_list(&self) -> &[u32] {
        &self.disk
    }

    /// The cached tier whose list holds `id`, if any.
    fn home_tier(&self, id: u32) -> Option<Tier> {
        if self.gpu.contains(&id) {
            Some(Tier::Gpu)
        } else if self.pin.contains(&id) {
            Some(Tier::Pin)
        } else if self.page.contains(&id) {
            Some(Tier::Page)
        } else {
            None
        }
    }

    pub fn contains(&self, id: u32) -> bool {
        self.home_tier(id).is_some() || self.disk.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.gpu.len() + self.pin.len() + self.page.len() + self.disk.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Slices the hotness-sorted ids at `floor(tau * N)` boundaries into the four
/// tier lists, hottest ranks first.
pub fn build_lists(
    sorted_ids: &[u32],
    tau_gpu: f64,
    tau_pin: f64,
    tau_page: f64,
) -> Result<TierListAssignment, HotnessError> {
    let taus = [tau_gpu, tau_pin, tau_page];
    if taus.iter().any(|t| !(0.0..=1.0).contains(t) || !t.is_finite()) || taus.iter().sum::<f64>() > 1.0 {
        return Err(HotnessError::InvalidFractions(taus));
    }
    let n = sorted_ids.len();
    let idx1 = (tau_gpu * n as f64).floor() as usize;
    let idx2 = idx1 + (tau_pin * n as f64).floor() as usize;
    let idx3 = idx2 + (tau_page * n as f64).floor() as usize;
    Ok(TierListAssignment {
        gpu: sorted_ids[..idx1].to_vec(),
        pin: sorted_ids[idx1..idx2].to_vec(),
        page: sorted_ids[idx2..idx3].to_vec(),
        disk: sorted_ids[idx3..].to_vec(),
    })
}

/// What one access did: where it hit, which transfer legs moved how many
/// bytes, and which residents were evicted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessOutcome {
    pub hit_tier: Tier,
    pub transfers: Vec<(Link, u64)>,
    pub evictions: Vec<(Tier, u32)>,
}

/// An LRU-ordered resident set with a fixed capacity. Most recent at the
/// front; linear scans are fine at the queue sizes the tiers use.
#[derive(Debug, Clone, Default)]
struct LruQueue {
    order: Vec<u32>,
    cap: usize,
}

impl LruQueue {
    fn new(cap: usize) -> Self {
        LruQueue { order: Vec::with_capacity(cap.min(1024)), cap }
    }

    fn contains(&self, id: u32) -> bool {
        self.order.contains(&id)
    }

    fn touch(&mut self, id: u32) {
        let pos = self.order.iter().position(|&x| x == id).expect("touch of non-resident id");
        let id = self.order.remove(pos);
        self.order.insert(0, id);
    }

    /// Inserts at the MRU position, evicting the LRU resident on overflow.
    fn put(&mut self, id: u32) -> Option<u32> {
        debug_assert!(!self.contains(id), "put of an already resident id");
        if self.cap == 0 {
            return None;
        }
        let evicted = if self.order.len() == self.cap { self.order.pop() } else { None };
        self.order.insert(0, id);
        evicted
    }

    fn len(&self) -> usize {
        self.order.len()
    }
}

/// The residency state machine: three LRU queues plus the static tier lists
/// and a per-chunk transfer-size table.
#[derive(Debug, Clone)]
pub struct PlacementState {
    lists: TierListAssignment,
    home: HashMap<u32, Tier>,
    queue_gpu: LruQueue,
    queue_pin: LruQueue,
    queue_page: LruQueue,
    /// Bytes moved per transfer leg for each id (compressed size).
    sizes: HashMap<u32, u64>,
}

impl PlacementState {
    /// Queue capacities default to the list sizes: the thresholds that carve
    /// the lists also bound how many chunks each tier may hold.
    pub fn new(lists: TierListAssignment, sizes: impl IntoIterator<Item = (u32, u64)>) -> Self {
        let caps = [lists.gpu.len(), lists.pin.len(), lists.page.len()];
        Self::with_capacities(lists, sizes, caps)
    }

    pub fn with_capacities(
        lists: TierListAssignment,
        sizes: impl IntoIterator<Item = (u32, u64)>,
        caps: [usize; 3],
    ) -> Self {
        let mut home = HashMap::with_capacity(lists.len());
        for (tier, list) in
            [(Tier::Gpu, &lists.gpu), (Tier::Pin, &lists.pin), (Tier::Page, &lists.page), (Tier::Disk, &lists.disk)]
        {
            for &id in list {
                home.insert(id, tier);
            }
        }
        PlacementState {
            lists,
            home,
            queue_gpu: LruQueue::new(caps[0]),
            queue_pin: LruQueue::new(caps[1]),
            queue_page: LruQueue::new(caps[2]),
            sizes: sizes.into_iter().collect(),
        }
    }

    pub fn lists(&self) -> &TierListAssignment {
        &self.lists
    }

    fn size_of(&self, id: u32) -> Result<u64, PlacementError> {
        self.sizes.get(&id).copied().ok_or(PlacementError::UnknownId(id))
    }

    /// One access, following the tier walk exactly: GPU hit, else pinned hit
    /// with GPU promotion, else pageable hit with GPU/pinned promotion, else
    /// disk load placed into the queue of the chunk's own list.
    pub fn access(&mut self, id: u32) -> Result<AccessOutcome, PlacementError> {
        let bytes = self.size_of(id)?;
        let home = *self.home.get(&id).ok_or(PlacementError::UnknownId(id))?;
        let mut evictions = Vec::new();
        let outcome = if self.queue_gpu.contains(id) {
            self.queue_gpu.touch(id);
            AccessOutcome { hit_tier: Tier::Gpu, transfers: vec![], evictions }
        } else if self.queue_pin.contains(id) {
            self.queue_pin.touch(id);
            if home == Tier::Gpu {
                if let Some(victim) = self.queue_gpu.put(id) {
                    evictions.push((Tier::Gpu, victim));
                }
            }
            AccessOutcome {
                hit_tier: Tier::Pin,
                transfers: vec![(Link::PinToGpu, bytes)],
                evictions,
            }
        } else if self.queue_page.contains(id) {
            self.queue_page.touch(id);
            if home == Tier::Gpu {
                if let Some(victim) = self.queue_gpu.put(id) {
                    evictions.push((Tier::Gpu, victim));
                }
            }
            if home == Tier::Pin {
                if let Some(victim) = self.queue_pin.put(id) {
                    evictions.push((Tier::Pin, victim));
                }
            }
            AccessOutcome {
                hit_tier: Tier::Page,
                transfers: vec![(Link::PageToPin, bytes), (Link::PinToGpu, bytes)],
                evictions,
            }
        } else {
            match home {
                Tier::Gpu => {
                    if let Some(victim) = self.queue_gpu.put(id) {
                        evictions.push((Tier::Gpu, victim));
                    }
                }
                Tier::Pin => {
                    if let Some(victim) = self.queue_pin.put(id) {
                        evictions.push((Tier::Pin, victim));
                    }
                }
                Tier::Page => {
                    if let Some(victim) = self.queue_page.put(id) {
                        evictions.push((Tier::Page, victim));
                    }
                }
                Tier::Disk => {} // disk-list chunks are never cached
            }
            AccessOutcome {
                hit_tier: Tier::Disk,
                transfers: vec![
                    (Link::DiskToPage, bytes),
                    (Link::PageToPin, bytes),
                    (Link::PinToGpu, bytes),
                ],
                evictions,
            }
        };
        debug_assert!(self.capacities_respected(), "queue exceeded its capacity");
        Ok(outcome)
    }

    /// Empties the queues; lists and sizes are retained.
    pub fn reset(&mut self) {
        self.queue_gpu.order.clear();
        self.queue_pin.order.clear();
        self.queue_page.order.clear();
    }

    pub fn resident_counts(&self) -> [usize; 3] {
        [self.queue_gpu.len(), self.queue_pin.len(), self.queue_page.len()]
    }

    pub fn capacities_respected(&self) -> bool {
        self.queue_gpu.len() <= self.queue_gpu.cap
            && self.queue_pin.len() <= self.queue_pin.cap
            && self.queue_page.len() <= self.queue_page.cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lists_one_per_tier() -> TierListAssignment {
        // ids 0..4 sorted by hotness; one id per list.
        build_lists(&[0, 1, 2, 3], 0.25, 0.25, 0.25).unwrap()
    }

    fn sizes(n: u32) -> Vec<(u32, u64)> {
        (0..n).map(|id| (id, 100)).collect()
    }

    #[test]
    fn build_lists_slices_by_fraction() {
        let ids: Vec<u32> = (0..20).collect();
        let lists = build_lists(&ids, 0.05, 0.05, 0.10).unwrap();
        assert_eq!(lists.gpu_list(), &[0]);
        assert_eq!(lists.pin_list(), &[1]);
        assert_eq!(lists.page_list(), &[2, 3]);
        assert_eq!(lists.disk_list().len(), 16);

        let all_disk = build_lists(&ids, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(all_disk.disk_list().len(), 20);

        let lists = lists_one_per_tier();
        assert_eq!((lists.gpu_list(), lists.pin_list()), ([0].as_slice(), [1].as_slice()));
    }

    #[test]
    fn invalid_fractions_rejected() {
        assert!(build_lists(&[0], 0.6, 0.3, 0.2).is_err());
        assert!(build_lists(&[0], -0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn first_access_loads_from_disk_then_hits_gpu() {
        let mut state = PlacementState::new(lists_one_per_tier(), sizes(4));
        let first = state.access(0).unwrap();
        assert_eq!(first.hit_tier, Tier::Disk);
        assert_eq!(first.transfers.len(), 3);
        let second = state.access(0).unwrap();
        assert_eq!(second.hit_tier, Tier::Gpu);
        assert!(second.transfers.is_empty());
        assert!(second.evictions.is_empty());
    }

    #[test]
    fn disk_list_ids_are_never_cached() {
        let mut state = PlacementState::new(lists_one_per_tier(), sizes(4));
        for _ in 0..5 {
            let outcome = state.access(3).unwrap();
            assert_eq!(outcome.hit_tier, Tier::Disk);
        }
        assert_eq!(state.resident_counts(), [0, 0, 0]);
    }

    #[test]
    fn lru_eviction_on_full_gpu_queue() {
        // Two gpu-list ids but capacity 1.
        let lists = build_lists(&[0, 1, 2, 3], 0.5, 0.25, 0.25).unwrap();
        let mut state = PlacementState::with_capacities(lists, sizes(4), [1, 1, 1]);
        assert_eq!(state.access(0).unwrap().hit_tier, Tier::Disk);
        let outcome = state.access(1).unwrap();
        assert_eq!(outcome.hit_tier, Tier::Disk);
        assert_eq!(outcome.evictions, vec![(Tier::Gpu, 0)]);
        // 0 was evicted, so it reloads from disk, evicting 1.
        let outcome = state.access(0).unwrap();
        assert_eq!(outcome.hit_tier, Tier::Disk);
        assert_eq!(outcome.evictions, vec![(Tier::Gpu, 1)]);
    }

    #[test]
    fn lru_victim_is_least_recently_used() {
        let lists = build_lists(&[0, 1, 2], 1.0, 0.0, 0.0).unwrap();
        let mut state = PlacementState::with_capacities(lists, sizes(3), [2, 0, 0]);
        state.access(0).unwrap();
        state.access(1).unwrap();
        state.access(0).unwrap(); // refresh 0; victim must be 1
        let outcome = state.access(2).unwrap();
        assert_eq!(outcome.evictions, vec![(Tier::Gpu, 1)]);
    }

    #[test]
    fn pin_list_id_stays_pinned_across_hits() {
        // Residency is inclusive: serving a pin hit never removes the pinned
        // copy, so repeated accesses keep hitting pin.
        let mut state = PlacementState::new(lists_one_per_tier(), sizes(4));
        assert_eq!(state.access(1).unwrap().hit_tier, Tier::Disk);
        let hit = state.access(1).unwrap();
        assert_eq!(hit.hit_tier, Tier::Pin);
        assert_eq!(hit.transfers, vec![(Link::PinToGpu, 100)]);
        // Not promoted to GPU (not a gpu-list id), still resident in pin.
        assert_eq!(state.resident_counts(), [0, 1, 0]);
        assert_eq!(state.access(1).unwrap().hit_tier, Tier::Pin);
    }

    #[test]
    fn page_hit_transfers_two_legs() {
        let mut state = PlacementState::new(lists_one_per_tier(), sizes(4));
        state.access(2).unwrap();
        let hit = state.access(2).unwrap();
        assert_eq!(hit.hit_tier, Tier::Page);
        assert_eq!(hit.transfers, vec![(Link::PageToPin, 100), (Link::PinToGpu, 100)]);
    }

    #[test]
    fn reset_clears_queues_but_keeps_lists() {
        let mut state = PlacementState::new(lists_one_per_tier(), sizes(4));
        state.access(0).unwrap();
        state.access(1).unwrap();
        let lists_before = state.lists().clone();
        state.reset();
        assert_eq!(state.resident_counts(), [0, 0, 0]);
        assert_eq!(state.lists(), &lists_before);
        assert_eq!(state.access(0).unwrap().hit_tier, Tier::Disk);
        state.reset();
        state.reset(); // idempotent
        assert_eq!(state.resident_counts(), [0, 0, 0]);
    }

    #[test]
    fn unknown_id_rejected() {
        let mut state = PlacementState::new(lists_one_per_tier(), sizes(4));
        assert_eq!(state.access(9), Err(PlacementError::UnknownId(9)));
    }

    #[test]
    fn gpu_hit_leaves_other_queues_untouched() {
        let mut state = PlacementState::new(lists_one_per_tier(), sizes(4));
        state.access(1).unwrap(); // pin resident
        state.access(0).unwrap(); // gpu resident
        let counts = state.resident_counts();
        state.access(0).unwrap(); // gpu hit
        assert_eq!(state.resident_counts(), counts);
    }
}
