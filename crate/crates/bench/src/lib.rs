//! Benchmark harness for click guidance: dataset loading, a synthetic
//! dataset, the clicks-to-IoU protocol, parameter sweeps and reports.

pub mod benchmark;
pub mod dataset;
pub mod error;
pub mod report;
pub mod sweep;
pub mod synth;

pub use benchmark::{
    run_benchmark, BenchConfig, BenchmarkReport, InstanceResult, SegmenterChoice, DEFAULT_K,
};
pub use dataset::{load_dataset, Dataset, DatasetInstance, LoadError};
pub use error::{BenchError, Result};
pub use sweep::{sweep, SweepParam, SweepReport};
pub use synth::{make_synthetic_dataset, synthetic_instances};
