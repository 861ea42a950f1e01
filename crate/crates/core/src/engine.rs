//! Pieces shared by every maintenance engine.

use thiserror::Error;

use crate::metrics::Probe;
use crate::relation::{Mult, Partition, Relation, Value};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("relation {rel} expects arity {expected}, got {got}")]
    Schema { rel: usize, expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn check_eps(eps: f64) -> Result<f64, EngineError> {
    if (0.0..=1.0).contains(&eps) {
        Ok(eps)
    } else {
        Err(EngineError::Config(format!("epsilon {eps} outside [0, 1]")))
    }
}

/// Common interface of the count engines.
pub trait Engine: Probe {
    /// Single-tuple update `{t ↦ m}` to relation `rel`, with rebalancing.
    fn on_update(&mut self, rel: usize, t: &[Value], m: Mult);

    /// Current query result.
    fn answer(&self) -> i64;

    /// Arity of each input relation, in relation order.
    fn arities(&self) -> Vec<usize>;

    /// Size invariant, partition conditions, storage integrity and view
    /// consistency by recomputation.
    fn check_invariants(&self) -> Result<(), String>;

    /// Total (probes, scans) over every stored relation and view.
    fn access_totals(&self) -> (u64, u64);
}

/// θ = N^ε, in double precision.
pub fn theta(n: u64, eps: f64) -> f64 {
    (n as f64).powf(eps)
}

/// Applies the size rules to the threshold base: doubles N when |D| reaches
/// N, sets N to ⌊N/2⌋−1 when |D| < ⌊N/4⌋. Returns true when N changed.
pub fn resize(n: &mut u64, db_size: usize) -> bool {
    let d = db_size as u64;
    if d >= *n {
        *n *= 2;
        true
    } else if d < *n / 4 {
        // |D| < ⌊N/4⌋ forces N ≥ 4, so the result is at least 1.
        let half = *n / 2;
        assert!(half >= 2, "threshold base would drop below 1");
        *n = half - 1;
        true
    } else {
        false
    }
}

pub fn size_invariant(n: u64, db_size: usize) -> Result<(), String> {
    let d = db_size as u64;
    if n / 4 <= d && d < n {
        Ok(())
    } else {
        Err(format!("size invariant violated: N={n}, |D|={d}"))
    }
}

/// Adjusts an entry count after an update that produced `new` from `new - m`.
pub(crate) fn track_size(db_size: &mut usize, new: Mult, m: Mult) {
    let old = new - m;
    if old == 0 && new != 0 {
        *db_size += 1;
    } else if old != 0 && new == 0 {
        *db_size -= 1;
    }
}

pub(crate) fn compare_view(name: &str, stored: &Relation, expected: &Relation) -> Result<(), String> {
    if stored == expected {
        Ok(())
    } else {
        Err(format!("view {name} differs from recomputation: stored {stored:?}, expected {expected:?}"))
    }
}

pub(crate) fn partition_access(p: &Partition) -> (u64, u64) {
    p.parts().iter().fold((0, 0), |acc, r| add_access(acc, r.access_counts()))
}

pub(crate) fn add_access(a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
    (a.0 + b.0, a.1 + b.1)
}
