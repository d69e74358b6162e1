//! Single-threaded execution of coordinated PAFGs.
//!
//! Every passive block becomes a [`PassiveKernel`]; every active block is
//! an actor whose ports are bound to kernel ports. The scheduler sweeps
//! the active blocks round-robin and fires each one whose firing rule
//! holds against the current kernel state.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{KernelError, PassiveKernel};
use crate::model::{
    ActorError, ActorLibrary, ApplicationGraph, CfdfActor, IoRole, PortIo, Rates, Token,
};
use crate::pafg::{is_alternating, BlockCategory, Coord, CoordinatedPafg};
use crate::transform::{compute_bmr, derive_direct_pafg};

pub const DEFAULT_MAX_SWEEPS: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("only alternating PAFGs can be executed")]
    NotAlternating,
    #[error("block `{block}` has no {what} implementation")]
    MissingImplementation { block: String, what: &'static str },
    #[error("port `{actor}.{port}` is not bound to any passive block")]
    UnboundPort { actor: String, port: String },
    #[error("source `{0}` has no input stream")]
    UnboundIo(String),
    #[error("no input or output named `{0}` in this instance")]
    UnknownIo(String),
    #[error("`{actor}` violated its rates: {detail}")]
    ContractViolation { actor: String, detail: String },
    #[error("deadlock after {sink_tokens} of {target} sink tokens; populations: {snapshot:?}")]
    Deadlock {
        sink_tokens: u64,
        target: u64,
        snapshot: BTreeMap<String, Vec<usize>>,
    },
    #[error("no termination after {0} sweeps")]
    SweepLimit(u64),
    #[error("invalid schedule order: {0}")]
    BadOrder(String),
    #[error("actor `{actor}`: {source}")]
    Actor { actor: String, source: ActorError },
    #[error("block `{block}`: {source}")]
    Kernel { block: String, source: KernelError },
    #[error("sink sets differ: {0:?} vs {1:?}")]
    SinkSetMismatch(Vec<String>, Vec<String>),
    #[error("{0}")]
    Setup(String),
}

/// When `run` returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCondition {
    /// At least this many tokens have reached sinks (summed over sinks).
    /// Quiescence before that is a deadlock.
    SinkTokens(u64),
    /// This many scheduler sweeps, or quiescence if sooner.
    Iterations(u64),
    /// Until a full sweep fires nothing.
    Quiescence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecStats {
    pub sink_tokens: u64,
    pub token_stores: u64,
    pub wall_seconds: f64,
    pub throughput_sps: f64,
    pub bmr_bytes: u64,
}

/// Input streams for source actors, by actor name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IoBindings {
    pub inputs: BTreeMap<String, Vec<Token>>,
}

impl IoBindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(mut self, actor: impl Into<String>, data: Vec<Token>) -> Self {
        self.inputs.insert(actor.into(), data);
        self
    }
}

struct KernelSlot {
    name: String,
    kernel: PassiveKernel<Token>,
    writes: u64,
    reads: Vec<u64>,
}

#[derive(Clone, Copy, Debug)]
struct PortBinding {
    kernel: usize,
    port: usize,
}

struct ActorSlot {
    actor: Box<dyn CfdfActor>,
    inputs: Vec<PortBinding>,
    outputs: Vec<PortBinding>,
}

/// Per-kernel write and read counters, for conservation checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelCounters {
    pub writes: u64,
    pub reads: Vec<u64>,
    pub populations: Vec<usize>,
}

pub struct ExecutionInstance {
    kernels: Vec<KernelSlot>,
    actors: Vec<ActorSlot>,
    order: Vec<usize>,
    bmr_bytes: u64,
    max_sweeps: u64,
}

impl std::fmt::Debug for ExecutionInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExecutionInstance")
            .field("kernels", &self.kernel_names())
            .field("actors", &self.actor_names())
            .finish()
    }
}

fn kernel_err(block: &str) -> impl Fn(KernelError) -> RuntimeError + '_ {
    move |source| RuntimeError::Kernel {
        block: block.to_string(),
        source,
    }
}

/// Allocates kernels and actors for `z` and binds every actor port.
pub fn instantiate(
    z: &CoordinatedPafg,
    lib: &ActorLibrary,
    io: &IoBindings,
) -> Result<ExecutionInstance, crate::Error> {
    if !is_alternating(z) {
        return Err(RuntimeError::NotAlternating.into());
    }
    let g = z.source();

    let mut kernels = Vec::new();
    let mut kernel_of = BTreeMap::new();
    for b in z.blocks_with(Coord::Pssv) {
        let cap = b.capacity.ok_or_else(|| crate::TransformError::MissingCapacity(b.name.clone()))?;
        let kernel = if b.category == BlockCategory::SimplePassiveBuffer {
            PassiveKernel::simple_fifo(cap).map_err(kernel_err(&b.name))?
        } else {
            let decl = b
                .actor()
                .and_then(|a| g.actor(a))
                .ok_or_else(|| RuntimeError::Setup(format!("block `{}` has no actor", b.name)))?;
            lib.instantiate_passive(decl, cap)?.ok_or_else(|| {
                RuntimeError::MissingImplementation {
                    block: b.name.clone(),
                    what: "passive",
                }
            })?
        };
        kernel_of.insert(b.name.clone(), kernels.len());
        kernels.push(KernelSlot {
            name: b.name.clone(),
            reads: vec![0; kernel.read_ports().len()],
            writes: 0,
            kernel,
        });
    }

    let mut actors = Vec::new();
    for b in z.blocks_with(Coord::Actv) {
        let decl = b
            .actor()
            .and_then(|a| g.actor(a))
            .ok_or_else(|| RuntimeError::Setup(format!("block `{}` has no actor", b.name)))?;
        let mut actor = lib.instantiate_active(decl).map_err(|_| {
            RuntimeError::MissingImplementation {
                block: b.name.clone(),
                what: "active",
            }
        })?;
        let layout = actor.layout().clone();
        let unbound = |port: &str| RuntimeError::UnboundPort {
            actor: decl.name.clone(),
            port: port.to_string(),
        };
        let mut inputs = Vec::new();
        for p in &layout.inputs {
            let e = g.edge_into(&decl.name, &p.name).ok_or_else(|| unbound(&p.name))?;
            let r = &e.endpoints;
            let binding = if let Some(&k) = kernel_of.get(&r.label()) {
                PortBinding { kernel: k, port: 0 }
            } else {
                let &k = kernel_of.get(&r.src).ok_or_else(|| unbound(&p.name))?;
                let port = kernels[k]
                    .kernel
                    .read_port(&r.src_port)
                    .map_err(kernel_err(&r.src))?;
                PortBinding { kernel: k, port }
            };
            inputs.push(binding);
        }
        let mut outputs = Vec::new();
        for p in &layout.outputs {
            let e = g.edge_from(&decl.name, &p.name).ok_or_else(|| unbound(&p.name))?;
            let r = &e.endpoints;
            let binding = if let Some(&k) = kernel_of.get(&r.label()) {
                PortBinding { kernel: k, port: 0 }
            } else {
                let &k = kernel_of.get(&r.snk).ok_or_else(|| unbound(&p.name))?;
                let port = kernels[k]
                    .kernel
                    .write_port(&r.snk_port)
                    .map_err(kernel_err(&r.snk))?;
                PortBinding { kernel: k, port }
            };
            outputs.push(binding);
        }
        if actor.io_role() == IoRole::Source {
            let data = io
                .inputs
                .get(&decl.name)
                .ok_or_else(|| RuntimeError::UnboundIo(decl.name.clone()))?;
            actor.bind_input(data.clone()).map_err(|source| RuntimeError::Actor {
                actor: decl.name.clone(),
                source,
            })?;
        }
        actors.push(ActorSlot {
            actor,
            inputs,
            outputs,
        });
    }
    for name in io.inputs.keys() {
        let known = actors
            .iter()
            .any(|a| a.actor.name() == name && a.actor.io_role() == IoRole::Source);
        if !known {
            return Err(RuntimeError::UnknownIo(name.clone()).into());
        }
    }

    Ok(ExecutionInstance {
        order: (0..actors.len()).collect(),
        kernels,
        actors,
        bmr_bytes: compute_bmr(z)?.total_bytes,
        max_sweeps: DEFAULT_MAX_SWEEPS,
    })
}

/// Runs an application graph in pure dataflow form, i.e. as its direct PAFG.
pub fn instantiate_graph(
    g: impl Into<Arc<ApplicationGraph>>,
    lib: &ActorLibrary,
    io: &IoBindings,
) -> Result<ExecutionInstance, crate::Error> {
    let z = derive_direct_pafg(g, lib)?;
    instantiate(&z, lib, io)
}

struct Io<'a> {
    kernels: &'a mut [KernelSlot],
    inputs: &'a [PortBinding],
    outputs: &'a [PortBinding],
    consumed: Vec<usize>,
    produced: Vec<usize>,
}

impl PortIo for Io<'_> {
    fn read(&mut self, input: usize) -> Result<Token, ActorError> {
        let b = *self.inputs.get(input).ok_or(ActorError::Empty(input))?;
        let slot = &mut self.kernels[b.kernel];
        let t = slot
            .kernel
            .read(b.port)
            .map_err(|_| ActorError::Empty(input))?;
        slot.reads[b.port] += 1;
        self.consumed[input] += 1;
        Ok(t)
    }

    fn write(&mut self, output: usize, token: Token) -> Result<(), ActorError> {
        let b = *self.outputs.get(output).ok_or(ActorError::Full(output))?;
        let slot = &mut self.kernels[b.kernel];
        slot.kernel.write(b.port, token).map_err(|e| match e {
            KernelError::Full => ActorError::Full(output),
            other => ActorError::Io(other.to_string()),
        })?;
        slot.writes += 1;
        self.produced[output] += 1;
        Ok(())
    }
}

impl ExecutionInstance {
    pub fn kernel_names(&self) -> Vec<&str> {
        self.kernels.iter().map(|k| k.name.as_str()).collect()
    }

    /// Active blocks in their current scheduling order.
    pub fn actor_names(&self) -> Vec<&str> {
        self.order.iter().map(|&i| self.actors[i].actor.name()).collect()
    }

    pub fn kernel(&self, block: &str) -> Option<&PassiveKernel<Token>> {
        self.kernels.iter().find(|k| k.name == block).map(|k| &k.kernel)
    }

    pub fn kernels(&self) -> impl Iterator<Item = (&str, &PassiveKernel<Token>)> {
        self.kernels.iter().map(|k| (k.name.as_str(), &k.kernel))
    }

    pub fn counters(&self) -> BTreeMap<String, KernelCounters> {
        self.kernels
            .iter()
            .map(|k| {
                let populations = (0..k.reads.len())
                    .map(|p| k.kernel.population(p).unwrap_or(0))
                    .collect();
                let c = KernelCounters {
                    writes: k.writes,
                    reads: k.reads.clone(),
                    populations,
                };
                (k.name.clone(), c)
            })
            .collect()
    }

    pub fn set_max_sweeps(&mut self, n: u64) {
        self.max_sweeps = n;
    }

    /// Replaces the sweep order; `names` must be a permutation of the
    /// active blocks.
    pub fn set_order(&mut self, names: &[&str]) -> Result<(), RuntimeError> {
        let mut order = Vec::with_capacity(names.len());
        for n in names {
            let i = self
                .actors
                .iter()
                .position(|a| a.actor.name() == *n)
                .ok_or_else(|| RuntimeError::BadOrder(format!("unknown block `{n}`")))?;
            if order.contains(&i) {
                return Err(RuntimeError::BadOrder(format!("`{n}` listed twice")));
            }
            order.push(i);
        }
        if order.len() != self.actors.len() {
            return Err(RuntimeError::BadOrder(format!(
                "{} of {} blocks listed",
                order.len(),
                self.actors.len()
            )));
        }
        self.order = order;
        Ok(())
    }

    pub fn token_stores(&self) -> u64 {
        self.kernels.iter().map(|k| k.writes).sum()
    }

    pub fn sink_tokens(&self) -> u64 {
        self.actors
            .iter()
            .filter_map(|a| a.actor.sink_output())
            .map(|s| s.len() as u64)
            .sum()
    }

    /// Tokens collected so far by each sink actor.
    pub fn sink_streams(&self) -> BTreeMap<String, Vec<Token>> {
        self.actors
            .iter()
            .filter(|a| a.actor.io_role() == IoRole::Sink)
            .map(|a| {
                let s = a.actor.sink_output().unwrap_or(&[]).to_vec();
                (a.actor.name().to_string(), s)
            })
            .collect()
    }

    fn snapshot(&self) -> BTreeMap<String, Vec<usize>> {
        self.counters()
            .into_iter()
            .map(|(k, c)| (k, c.populations))
            .collect()
    }

    fn enabled(&self, i: usize) -> bool {
        let a = &self.actors[i];
        let r = a.actor.rates();
        if !r.fireable {
            return false;
        }
        let ins = r.consume.iter().zip(&a.inputs).all(|(&need, b)| {
            need == 0 || self.kernels[b.kernel].kernel.population(b.port).unwrap_or(0) >= need
        });
        ins && r.produce.iter().zip(&a.outputs).all(|(&need, b)| {
            need == 0 || self.kernels[b.kernel].kernel.write_space(b.port).unwrap_or(0) >= need
        })
    }

    fn fire(&mut self, i: usize) -> Result<(), RuntimeError> {
        let slot = &mut self.actors[i];
        let expected: Rates = slot.actor.rates().clone();
        let mut io = Io {
            kernels: &mut self.kernels,
            inputs: &slot.inputs,
            outputs: &slot.outputs,
            consumed: vec![0; slot.inputs.len()],
            produced: vec![0; slot.outputs.len()],
        };
        let name = slot.actor.name().to_string();
        slot.actor.invoke(&mut io).map_err(|source| RuntimeError::Actor {
            actor: name.clone(),
            source,
        })?;
        if io.consumed != expected.consume || io.produced != expected.produce {
            return Err(RuntimeError::ContractViolation {
                actor: name,
                detail: format!(
                    "declared consume {:?} produce {:?}, observed consume {:?} produce {:?}",
                    expected.consume, expected.produce, io.consumed, io.produced
                ),
            });
        }
        Ok(())
    }

    /// One round-robin pass; returns the number of firings.
    pub fn sweep(&mut self) -> Result<usize, RuntimeError> {
        self.sweep_until(u64::MAX)
    }

    fn sweep_until(&mut self, sink_target: u64) -> Result<usize, RuntimeError> {
        let mut fired = 0;
        for k in 0..self.order.len() {
            let i = self.order[k];
            if self.enabled(i) {
                self.fire(i)?;
                fired += 1;
                if self.actors[i].actor.io_role() == IoRole::Sink && self.sink_tokens() >= sink_target {
                    break;
                }
            }
        }
        Ok(fired)
    }

    pub fn run(&mut self, stop: StopCondition) -> Result<ExecStats, RuntimeError> {
        let start = Instant::now();
        let stores0 = self.token_stores();
        let sinks0 = self.sink_tokens();
        let target = match stop {
            StopCondition::SinkTokens(n) => n,
            _ => u64::MAX,
        };
        let mut sweeps = 0u64;
        loop {
            if self.sink_tokens() >= target {
                break;
            }
            if let StopCondition::Iterations(n) = stop {
                if sweeps >= n {
                    break;
                }
            }
            if sweeps >= self.max_sweeps {
                return Err(RuntimeError::SweepLimit(sweeps));
            }
            let fired = self.sweep_until(target)?;
            sweeps += 1;
            if fired == 0 {
                if let StopCondition::SinkTokens(n) = stop {
                    return Err(RuntimeError::Deadlock {
                        sink_tokens: self.sink_tokens(),
                        target: n,
                        snapshot: self.snapshot(),
                    });
                }
                break;
            }
        }
        let wall_seconds = start.elapsed().as_secs_f64();
        let sink_tokens = self.sink_tokens() - sinks0;
        Ok(ExecStats {
            sink_tokens,
            token_stores: self.token_stores() - stores0,
            wall_seconds,
            throughput_sps: if wall_seconds > 0.0 {
                sink_tokens as f64 / wall_seconds
            } else {
                0.0
            },
            bmr_bytes: self.bmr_bytes,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamDivergence {
    pub sink: String,
    pub index: usize,
    pub a: Option<Token>,
    pub b: Option<Token>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamComparison {
    pub equal: bool,
    pub divergence: Option<StreamDivergence>,
}

/// Bit-exact comparison of two runs' sink streams. The first divergence is
/// reported in sink-name order; a length mismatch diverges at the shorter
/// length.
pub fn compare_streams(
    a: &BTreeMap<String, Vec<Token>>,
    b: &BTreeMap<String, Vec<Token>>,
) -> Result<StreamComparison, RuntimeError> {
    if !a.keys().eq(b.keys()) {
        return Err(RuntimeError::SinkSetMismatch(
            a.keys().cloned().collect(),
            b.keys().cloned().collect(),
        ));
    }
    for (sink, xs) in a {
        let ys = &b[sink];
        if let Some((index, x, y)) = crate::kernels::first_divergence(xs, ys) {
            return Ok(StreamComparison {
                equal: false,
                divergence: Some(StreamDivergence {
                    sink: sink.clone(),
                    index,
                    a: x,
                    b: y,
                }),
            });
        }
    }
    Ok(StreamComparison {
        equal: true,
        divergence: None,
    })
}
