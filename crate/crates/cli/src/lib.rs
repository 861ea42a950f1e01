//! Stream format, workload generators and the run and bench drivers behind
//! the `ivme` binary.

pub mod bench;
pub mod config;
pub mod gen;
pub mod run;
pub mod stream;

pub use bench::{bench, measure, BenchConfig, BenchRow, Measurement};
pub use config::{parse_query, ConfigError, Emit, Mode, RunConfig};
pub use gen::{insert_stream, mixed_stream, Workload};
pub use run::{load_stream, run, Record, RunError};
pub use stream::{format_stream, format_update, parse_stream, ParseError, Update};
