//! Dataflow application graphs, passive-active flow graphs (PAFGs) and the
//! passivization transform, with a single-threaded runtime for executing
//! coordinated PAFGs.
//!
//! The usual pipeline:
//!
//! ```
//! use pafg::{ActorDecl, ActorLibrary, ApplicationGraph, TokenType};
//! use pafg::transform::{compute_bmr, derive_direct_pafg, passivize_fixpoint, PassivizationPolicy};
//!
//! let lib = ActorLibrary::standard();
//! let mut g = ApplicationGraph::new();
//! g.add_actor(&lib, ActorDecl::new("S", "src")).unwrap();
//! g.add_actor(&lib, ActorDecl::new("F", "fork")).unwrap();
//! g.add_actor(&lib, ActorDecl::new("A", "snk")).unwrap();
//! g.add_actor(&lib, ActorDecl::new("B", "snk")).unwrap();
//! g.connect(&lib, "S", "out", "F", "in", 4, TokenType::F64).unwrap();
//! g.connect(&lib, "F", "out0", "A", "in", 4, TokenType::F64).unwrap();
//! g.connect(&lib, "F", "out1", "B", "in", 4, TokenType::F64).unwrap();
//!
//! let direct = derive_direct_pafg(g, &lib).unwrap();
//! let (opt, _) = passivize_fixpoint(&direct, &PassivizationPolicy::Auto).unwrap();
//! assert_eq!(compute_bmr(&direct).unwrap().total_bytes, 96);
//! assert_eq!(compute_bmr(&opt).unwrap().total_bytes, 32);
//! ```

pub mod apps;
pub mod format;
pub mod graph;
pub mod kernels;
pub mod model;
pub mod pafg;
pub mod runtime;
pub mod transform;

use thiserror::Error;

pub use graph::{DirectedGraph, Edge, GraphError};
pub use kernels::{KernelError, MultiReadRingBuffer, PassiveKernel};
pub use model::{
    ActorDecl, ActorError, ActorLibrary, ApplicationGraph, CfdfActor, DataflowEdge, EdgeRef,
    ModelError, Params, Token, TokenType,
};
pub use pafg::{Block, Coord, CoordinatedPafg, CoordinationFunction, Pafg, PafgError};
pub use transform::TransformError;

pub type RingBufferF64 = MultiReadRingBuffer<f64>;
pub type RingBufferF32 = MultiReadRingBuffer<f32>;
pub type PassiveKernelF64 = PassiveKernel<f64>;
pub type TokenKernel = PassiveKernel<Token>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Actor(#[from] ActorError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Pafg(#[from] PafgError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Runtime(#[from] runtime::RuntimeError),
    #[error(transparent)]
    Format(#[from] format::FormatError),
}
