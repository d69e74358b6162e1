//! Synthetic fork-cascade benchmark.
//!
//! `SRC -> F1 -> G1 -> F2 -> G2 -> ... -> F<n> -> G<n> -> SNK`, where every
//! `F<i>` is a fork and every `G<i>` a gain. Forks cannot feed each other
//! directly and still be passivized one after another, so the gains sit
//! in between. Each extra fork output `F<i>.out<j>` feeds an accumulator
//! `ACC<i>_<j>` and a sink `SNK<i>_<j>`. All edges have capacity `W`.

use thiserror::Error;

use crate::model::{ActorDecl, ActorLibrary, ApplicationGraph, ModelError, Token, TokenType};
use crate::runtime::IoBindings;
use crate::transform::TokenProfile;

use super::Lcg;

/// Window sizes swept by the benchmark.
pub const STANDARD_WINDOWS: [usize; 5] = [16384, 32768, 65536, 131072, 262144];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForkCascadeError {
    #[error("window size must be at least 1")]
    ZeroWindow,
    #[error("need at least one fork")]
    NoForks,
    #[error("fork fanout must be at least 1")]
    ZeroFanout,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForkCascadeConfig {
    pub window: usize,
    pub forks: usize,
    pub fanout: usize,
}

impl ForkCascadeConfig {
    pub fn new(window: usize) -> Self {
        ForkCascadeConfig {
            window,
            forks: 6,
            fanout: 2,
        }
    }

    pub fn validate(&self) -> Result<(), ForkCascadeError> {
        match () {
            _ if self.window == 0 => Err(ForkCascadeError::ZeroWindow),
            _ if self.forks == 0 => Err(ForkCascadeError::NoForks),
            _ if self.fanout == 0 => Err(ForkCascadeError::ZeroFanout),
            _ => Ok(()),
        }
    }

    pub fn edge_count(&self) -> usize {
        1 + self.forks * 2 * self.fanout
    }

    pub fn fork_names(&self) -> Vec<String> {
        (1..=self.forks).map(|i| format!("F{i}")).collect()
    }

    pub fn sink_count(&self) -> usize {
        1 + self.forks * (self.fanout - 1)
    }
}

pub fn build_fork_cascade(
    cfg: &ForkCascadeConfig,
    lib: &ActorLibrary,
) -> Result<ApplicationGraph, ForkCascadeError> {
    cfg.validate()?;
    let w = cfg.window;
    let ty = TokenType::F64;
    let mut g = ApplicationGraph::new();
    g.add_actor(lib, ActorDecl::new("SRC", "src"))?;
    g.add_actor(lib, ActorDecl::new("SNK", "snk"))?;
    let mut upstream = "SRC".to_string();
    for i in 1..=cfg.forks {
        let (f, gain) = (format!("F{i}"), format!("G{i}"));
        g.add_actor(lib, ActorDecl::new(&f, "fork").param("fanout", cfg.fanout))?;
        g.add_actor(lib, ActorDecl::new(&gain, "gain").param("k", 0.5))?;
        g.connect(lib, &upstream, "out", &f, "in", w, ty)?;
        g.connect(lib, &f, "out0", &gain, "in", w, ty)?;
        for j in 1..cfg.fanout {
            let (acc, snk) = (format!("ACC{i}_{j}"), format!("SNK{i}_{j}"));
            g.add_actor(lib, ActorDecl::new(&acc, "acc"))?;
            g.add_actor(lib, ActorDecl::new(&snk, "snk"))?;
            g.connect(lib, &f, &format!("out{j}"), &acc, "in", w, ty)?;
            g.connect(lib, &acc, "out", &snk, "in", w, ty)?;
        }
        upstream = gain;
    }
    g.connect(lib, &upstream, "out", "SNK", "in", w, ty)?;
    Ok(g)
}

/// `tokens` uniform samples in `[-1, 1)` for `SRC`.
pub fn io_bindings(tokens: usize, rng: &mut Lcg) -> IoBindings {
    IoBindings::new().input("SRC", (0..tokens).map(|_| Token::F64(rng.next_signed())).collect())
}

/// Every edge carries the same number of tokens.
pub fn token_profile(g: &ApplicationGraph, tokens: u64) -> TokenProfile {
    let mut p = TokenProfile::new();
    for e in g.edges() {
        p.set(&e.endpoints.src, &e.endpoints.snk, tokens);
    }
    p
}

/// Bytes freed by passivizing every fork: each one drops its input and
/// `fanout` output buffers and gains one ring of `W` slots.
pub fn analytic_bmr_reduction(cfg: &ForkCascadeConfig) -> u64 {
    (cfg.forks * cfg.fanout * cfg.window * 8) as u64
}
