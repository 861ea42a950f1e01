//! Incremental maintenance of count queries under single-tuple updates,
//! using degree-based heavy/light partitioning with a tunable ε.

pub mod engine;
pub mod lw;
pub mod enumerate;
pub mod metrics;
pub mod oracle;
pub mod path4;
pub mod refined;
pub mod relation;
pub mod selfjoin;
pub mod triangle;

pub use engine::{Engine, EngineError};
pub use enumerate::{EnumState, Enumeration};
pub use lw::LwState;
pub use path4::{Path4State, Side};
pub use metrics::{OpCounter, OpCounts, Probe, StepRecord};
pub use refined::RefinedState;
pub use relation::{Direction, Mult, Part, Partition, Relation, Tuple, Value};
pub use selfjoin::SelfJoinState;
pub use triangle::{static_count, EpsConfig, TriangleState};
