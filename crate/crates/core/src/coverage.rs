//! Forward-direction checks and bounded coverage scans.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::analytic::generate_stair;
use crate::backward::subtree_stairs;
use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::numtheory::{collatz_step, stair_index_iu, StairIndex};
use crate::par::Execution;

/// True iff `j` applications take `value` to `2^(2k)` with no power of
/// two on the way (the start included). Stairs start at `j = 1`.
pub fn verify_forward(value: &Nat, k: u32, j: u32) -> bool {
    if value.is_zero() || j == 0 {
        return false;
    }
    let mut x = value.clone();
    for _ in 0..j {
        if x.power_of_two_exponent().is_some() {
            return false;
        }
        x = collatz_step(&x).expect("orbit stays positive");
    }
    x.power_of_two_exponent() == Some(2 * u64::from(k))
}

/// Which side of the comparison holds a value the other lacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Generated analytically but absent from the backward search.
    OnlyAnalytic,
    /// Found by the backward search but not generated.
    OnlyBackward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub j: u32,
    pub value: Nat,
    pub direction: Direction,
}

/// Compares accepted analytic stairs with backward-search stairs for
/// `j = 1..=j_max`, returning the first difference (lowest `j`, then
/// lowest value).
pub fn check_equivalence(k: u32, j_max: u32) -> Result<Option<Mismatch>> {
    let reference = subtree_stairs(k, j_max)?;
    for bfs in reference {
        let stair = generate_stair(k, bfs.index)?;
        let analytic: BTreeSet<Nat> = stair.accepted_values().cloned().collect();
        let only_analytic = analytic.difference(&bfs.members).next();
        let only_backward = bfs.members.difference(&analytic).next();
        let first = match (only_analytic, only_backward) {
            (Some(a), Some(b)) if b < a => Some((b, Direction::OnlyBackward)),
            (Some(a), _) => Some((a, Direction::OnlyAnalytic)),
            (None, Some(b)) => Some((b, Direction::OnlyBackward)),
            (None, None) => None,
        };
        if let Some((value, direction)) = first {
            return Ok(Some(Mismatch {
                j: bfs.index,
                value: value.clone(),
                direction,
            }));
        }
    }
    Ok(None)
}

/// Where a single value lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Invariant,
    Placed { k: u32, j: u64 },
    BudgetExceeded,
}

/// Classifies `n` by forward simulation. Contradictions propagate.
pub fn classify(n: u64, budget: u64) -> Result<Placement> {
    match stair_index_iu(&Nat::from(n), budget) {
        Ok(StairIndex::Invariant) => Ok(Placement::Invariant),
        Ok(StairIndex::Placed { steps, subtree }) => Ok(Placement::Placed { k: subtree, j: steps }),
        Err(Error::BudgetExceeded { .. }) => Ok(Placement::BudgetExceeded),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub k: u32,
    pub j: u64,
    pub count: u64,
}

/// Per-chunk tallies; `start..=end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkSummary {
    pub start: u64,
    pub end: u64,
    pub placed: u64,
    pub in_invariant: u64,
    pub budget_exceeded: u64,
}

/// Result of scanning `start..=bound`. A full scan starts at 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub start: u64,
    pub bound: u64,
    pub budget: u64,
    pub placed: u64,
    pub in_invariant: u64,
    pub budget_exceeded: Vec<u64>,
    pub histogram: Vec<HistogramEntry>,
    pub chunks: Vec<ChunkSummary>,
}

impl CoverageReport {
    /// Every value in range landed in the invariant or in some stair.
    pub fn complete(&self) -> bool {
        self.budget_exceeded.is_empty()
    }

    pub fn scanned(&self) -> u64 {
        self.placed + self.in_invariant + self.budget_exceeded.len() as u64
    }

    /// Joins two reports over adjacent ranges (`self` first).
    pub fn merge(mut self, other: CoverageReport) -> Result<CoverageReport> {
        if other.start != self.bound + 1 || other.budget != self.budget {
            return Err(Error::InvalidRange(format!(
                "cannot merge {}..={} (budget {}) after {}..={} (budget {})",
                other.start, other.bound, other.budget, self.start, self.bound, self.budget
            )));
        }
        let mut histogram = to_map(&self.histogram);
        for e in &other.histogram {
            *histogram.entry((e.k, e.j)).or_default() += e.count;
        }
        self.bound = other.bound;
        self.placed += other.placed;
        self.in_invariant += other.in_invariant;
        self.budget_exceeded.extend(other.budget_exceeded);
        self.histogram = from_map(histogram);
        self.chunks.extend(other.chunks);
        Ok(self)
    }
}

fn to_map(entries: &[HistogramEntry]) -> BTreeMap<(u32, u64), u64> {
    entries.iter().map(|e| ((e.k, e.j), e.count)).collect()
}

fn from_map(map: BTreeMap<(u32, u64), u64>) -> Vec<HistogramEntry> {
    map.into_iter()
        .map(|((k, j), count)| HistogramEntry { k, j, count })
        .collect()
}

/// Chunk width used when none is given.
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub budget: u64,
    /// Independent of the worker count, so reports do not depend on it.
    pub chunk_size: u64,
    pub execution: Execution,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            budget: crate::numtheory::DEFAULT_MAX_STEPS,
            chunk_size: DEFAULT_CHUNK_SIZE,
            execution: Execution::default(),
        }
    }
}

fn scan_chunk(start: u64, end: u64, budget: u64) -> Result<CoverageReport> {
    let mut histogram = BTreeMap::new();
    let mut placed = 0;
    let mut in_invariant = 0;
    let mut budget_exceeded = Vec::new();
    for n in start..=end {
        match classify(n, budget)? {
            Placement::Invariant => in_invariant += 1,
            Placement::Placed { k, j } => {
                placed += 1;
                *histogram.entry((k, j)).or_default() += 1;
            }
            Placement::BudgetExceeded => budget_exceeded.push(n),
        }
    }
    Ok(CoverageReport {
        start,
        bound: end,
        budget,
        placed,
        in_invariant,
        budget_exceeded: budget_exceeded.clone(),
        histogram: from_map(histogram),
        chunks: vec![ChunkSummary {
            start,
            end,
            placed,
            in_invariant,
            budget_exceeded: budget_exceeded.len() as u64,
        }],
    })
}

/// Scans `start..=end` in fixed-width chunks and merges them in order.
pub fn coverage_scan_range(start: u64, end: u64, config: &ScanConfig) -> Result<CoverageReport> {
    if start < 2 || end < start {
        return Err(Error::InvalidRange(format!("empty or invalid range {start}..={end}")));
    }
    if config.chunk_size == 0 || config.budget == 0 {
        return Err(Error::InvalidRange("chunk size and budget must be >= 1".into()));
    }
    let mut bounds = Vec::new();
    let mut lo = start;
    loop {
        let hi = lo.saturating_add(config.chunk_size - 1).min(end);
        bounds.push((lo, hi));
        if hi == end {
            break;
        }
        lo = hi + 1;
    }
    let budget = config.budget;
    let parts = config.execution.map(bounds, |(lo, hi)| scan_chunk(lo, hi, budget));
    let mut parts = parts.into_iter();
    let first = parts.next().expect("at least one chunk")?;
    parts.try_fold(first, |acc, part| acc.merge(part?))
}

/// Classifies every value in `2..=bound`.
pub fn coverage_scan(bound: u64, budget: u64) -> Result<CoverageReport> {
    coverage_scan_range(
        2,
        bound,
        &ScanConfig {
            budget,
            ..ScanConfig::default()
        },
    )
}
