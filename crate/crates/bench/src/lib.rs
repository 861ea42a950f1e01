//! Shared setup for the criterion benches.

use ivme_cli::{insert_stream, mixed_stream, Update, Workload};
use ivme_core::oracle::QuerySpec;
use ivme_core::Engine;

pub fn inserts(spec: QuerySpec, n: usize) -> Vec<Update> {
    insert_stream(spec, Workload::Hub, n, 1)
}

pub fn mixed(spec: QuerySpec, n: usize) -> Vec<Update> {
    mixed_stream(spec, Workload::Zipf, n, 64, 1)
}

/// Applies every update and returns the final answer.
pub fn replay<E: Engine>(mut eng: E, updates: &[Update]) -> i64 {
    for u in updates {
        eng.on_update(u.rel, &u.tuple, u.mult);
    }
    eng.answer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ivme_core::{EpsConfig, TriangleState};

    #[test]
    fn replay_counts() {
        let ups = inserts(QuerySpec::Triangle, 500);
        let a = replay(TriangleState::new(EpsConfig::uniform(0.5).unwrap()), &ups);
        let b = replay(TriangleState::new(EpsConfig::uniform(1.0).unwrap()), &ups);
        assert_eq!(a, b);
    }
}
