//! Benchmark applications and their input generators.

pub mod bench;
pub mod evm;
pub mod forkcascade;
pub mod lcg;

pub use bench::{run_direct_and_optimized, BenchReport};
pub use evm::{build_evm_graph, evm_oracle, EvmConfig, EvmError, EvmInputs};
pub use forkcascade::{build_fork_cascade, ForkCascadeConfig};
pub use lcg::Lcg;
