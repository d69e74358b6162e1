//! Passive block implementations and the active/passive equivalence
//! harness.

mod harness;
mod passive;
mod ring;

use thiserror::Error;

pub use harness::{
    check_mapping_equivalence, drive_passive, first_divergence, ActiveCluster, Divergence,
    MappingReport, PassiveUnderTest,
};
pub use passive::{
    capacity_rule, passive_fork, passive_gainfork, passive_interleave, KernelKind, PassiveKernel,
};
pub use ring::MultiReadRingBuffer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("buffer full")]
    Full,
    #[error("read port {0} is empty")]
    Empty(usize),
    #[error("unknown read port {0}")]
    UnknownReadPort(usize),
    #[error("unknown write port {0}")]
    UnknownWritePort(usize),
    #[error("unknown port `{0}`")]
    UnknownPortName(String),
    #[error("out-of-turn write on `{port}`; next write must go to `{expected}`")]
    OutOfTurn { port: String, expected: String },
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("a ring buffer needs at least one reader")]
    NoReaders,
    #[error("{0}")]
    Config(String),
}
