//! Operation accounting and scaling fits.

use std::cell::Cell;
use std::ops::{Add, Sub};

/// Monotone op counters. Interior mutability lets read-only traversals
/// count their work while the engine state is shared-borrowed.
#[derive(Debug, Default, Clone)]
pub struct OpCounter {
    lookups: Cell<u64>,
    iterations: Cell<u64>,
    moves: Cell<u64>,
    rebalance_major: Cell<u64>,
    rebalance_minor: Cell<u64>,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn lookup(&self) {
        self.lookups.set(self.lookups.get() + 1);
    }

    #[inline]
    pub fn lookups_n(&self, n: u64) {
        self.lookups.set(self.lookups.get() + n);
    }

    #[inline]
    pub fn iteration(&self) {
        self.iterations.set(self.iterations.get() + 1);
    }

    #[inline]
    pub fn moved(&self, n: u64) {
        self.moves.set(self.moves.get() + n);
    }

    pub fn major(&self) {
        self.rebalance_major.set(self.rebalance_major.get() + 1);
    }

    pub fn minor(&self) {
        self.rebalance_minor.set(self.rebalance_minor.get() + 1);
    }

    pub fn snapshot(&self) -> OpCounts {
        OpCounts {
            lookups: self.lookups.get(),
            iterations: self.iterations.get(),
            moves: self.moves.get(),
            rebalance_major: self.rebalance_major.get(),
            rebalance_minor: self.rebalance_minor.get(),
        }
    }
}

/// Plain snapshot of an [`OpCounter`].
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounts {
    pub lookups: u64,
    pub iterations: u64,
    pub moves: u64,
    pub rebalance_major: u64,
    pub rebalance_minor: u64,
}

impl OpCounts {
    /// lookups + iterations + moves: the update-time proxy.
    pub fn total(&self) -> u64 {
        self.lookups + self.iterations + self.moves
    }
}

impl Sub for OpCounts {
    type Output = OpCounts;
    fn sub(self, o: OpCounts) -> OpCounts {
        OpCounts {
            lookups: self.lookups - o.lookups,
            iterations: self.iterations - o.iterations,
            moves: self.moves - o.moves,
            rebalance_major: self.rebalance_major - o.rebalance_major,
            rebalance_minor: self.rebalance_minor - o.rebalance_minor,
        }
    }
}

impl Add for OpCounts {
    type Output = OpCounts;
    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts {
            lookups: self.lookups + o.lookups,
            iterations: self.iterations + o.iterations,
            moves: self.moves + o.moves,
            rebalance_major: self.rebalance_major + o.rebalance_major,
            rebalance_minor: self.rebalance_minor + o.rebalance_minor,
        }
    }
}

/// Per-step measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub update: String,
    pub ops: OpCounts,
    pub n: u64,
    pub db_size: usize,
    pub major_fired: bool,
    pub minor_fired: u64,
    pub space: usize,
}

/// What an engine exposes for measurement.
pub trait Probe {
    fn counters(&self) -> &OpCounter;
    fn threshold_base(&self) -> u64;
    fn db_size(&self) -> usize;
    /// Live entries across all partitions and materialized views.
    fn space(&self) -> usize;
}

/// Builds the record of one step from the counter snapshot taken before it.
pub fn record<P: Probe + ?Sized>(state: &P, before: OpCounts, step: usize, update: impl Into<String>) -> StepRecord {
    let ops = state.counters().snapshot() - before;
    StepRecord {
        step,
        update: update.into(),
        ops,
        n: state.threshold_base(),
        db_size: state.db_size(),
        major_fired: ops.rebalance_major > 0,
        minor_fired: ops.rebalance_minor,
        space: state.space(),
    }
}

/// Least-squares slope of ln(y) against ln(x).
///
/// # Panics
/// With fewer than 3 points or non-positive coordinates.
pub fn fit_scaling(points: &[(f64, f64)]) -> f64 {
    assert!(points.len() >= 3, "need at least 3 sizes");
    assert!(points.iter().all(|&(x, y)| x > 0.0 && y > 0.0), "log-log fit needs positive values");
    let k = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
