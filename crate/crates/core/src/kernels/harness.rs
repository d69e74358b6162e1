//! Mapping-equivalence harness: drives an active implementation (one or
//! more actors wired by FIFOs) and a passive implementation on the same
//! input streams and compares every output stream bit for bit.

use std::collections::VecDeque;

use super::{KernelError, PassiveKernel};
use crate::model::{
    enable, ActorError, ActorLibrary, ApplicationGraph, CfdfActor, PortIo, Token,
};

/// Read/write surface of a passive implementation under test.
pub trait PassiveUnderTest {
    fn write_port_count(&self) -> usize;
    fn read_port_count(&self) -> usize;
    fn write_space(&self, port: usize) -> Result<usize, KernelError>;
    fn write(&mut self, port: usize, token: Token) -> Result<(), KernelError>;
    fn population(&self, port: usize) -> Result<usize, KernelError>;
    fn read(&mut self, port: usize) -> Result<Token, KernelError>;
}

impl PassiveUnderTest for PassiveKernel<Token> {
    fn write_port_count(&self) -> usize {
        self.write_ports().len()
    }
    fn read_port_count(&self) -> usize {
        self.read_ports().len()
    }
    fn write_space(&self, port: usize) -> Result<usize, KernelError> {
        PassiveKernel::write_space(self, port)
    }
    fn write(&mut self, port: usize, token: Token) -> Result<(), KernelError> {
        PassiveKernel::write(self, port, token)
    }
    fn population(&self, port: usize) -> Result<usize, KernelError> {
        PassiveKernel::population(self, port)
    }
    fn read(&mut self, port: usize) -> Result<Token, KernelError> {
        PassiveKernel::read(self, port)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub port: usize,
    pub index: usize,
    pub active: Option<Token>,
    pub passive: Option<Token>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingReport {
    pub active_outputs: Vec<Vec<Token>>,
    pub passive_outputs: Vec<Vec<Token>>,
    pub divergence: Option<Divergence>,
}

impl MappingReport {
    pub fn equivalent(&self) -> bool {
        self.divergence.is_none()
    }
}

/// First index at which two streams differ, with the values found there
/// (`None` past the end of the shorter stream).
pub fn first_divergence(a: &[Token], b: &[Token]) -> Option<(usize, Option<Token>, Option<Token>)> {
    let n = a.len().max(b.len());
    (0..n)
        .find(|&i| a.get(i) != b.get(i))
        .map(|i| (i, a.get(i).copied(), b.get(i).copied()))
}

struct Channel {
    queue: VecDeque<Token>,
    capacity: usize,
}

/// A set of actors connected by bounded FIFOs, with some ports left open as
/// the cluster's external inputs and outputs.
pub struct ActiveCluster {
    actors: Vec<Box<dyn CfdfActor>>,
    channels: Vec<Channel>,
    in_bind: Vec<Vec<usize>>,
    out_bind: Vec<Vec<usize>>,
    external_in: Vec<usize>,
    external_out: Vec<usize>,
}

impl ActiveCluster {
    /// Builds the cluster from `graph`. `inputs` and `outputs` name the
    /// open `(actor, port)` pairs in the order the harness streams use.
    pub fn from_graph(
        lib: &ActorLibrary,
        graph: &ApplicationGraph,
        inputs: &[(&str, &str)],
        outputs: &[(&str, &str)],
    ) -> Result<Self, crate::Error> {
        let mut actors = Vec::new();
        let mut channels = Vec::new();
        let names: Vec<&str> = graph.actors().map(|a| a.name.as_str()).collect();
        let mut in_bind = Vec::new();
        let mut out_bind = Vec::new();
        for decl in graph.actors() {
            let actor = lib.instantiate_active(decl)?;
            in_bind.push(vec![usize::MAX; actor.layout().inputs.len()]);
            out_bind.push(vec![usize::MAX; actor.layout().outputs.len()]);
            actors.push(actor);
        }
        let index_of = |name: &str| names.iter().position(|n| *n == name);
        for e in graph.edges() {
            let ep = &e.endpoints;
            let (s, t) = (index_of(&ep.src).unwrap(), index_of(&ep.snk).unwrap());
            let sp = actors[s].layout().output_index(&ep.src_port).unwrap();
            let tp = actors[t].layout().input_index(&ep.snk_port).unwrap();
            out_bind[s][sp] = channels.len();
            in_bind[t][tp] = channels.len();
            channels.push(Channel {
                queue: VecDeque::new(),
                capacity: e.capacity,
            });
        }
        let mut open = |(actor, port): (&str, &str), input: bool| -> Result<usize, KernelError> {
            let bad = || KernelError::Config(format!("no open port `{actor}.{port}`"));
            let a = index_of(actor).ok_or_else(bad)?;
            let layout = actors[a].layout();
            let slot = if input {
                &mut in_bind[a][layout.input_index(port).ok_or_else(bad)?]
            } else {
                &mut out_bind[a][layout.output_index(port).ok_or_else(bad)?]
            };
            if *slot != usize::MAX {
                return Err(bad());
            }
            *slot = channels.len();
            channels.push(Channel {
                queue: VecDeque::new(),
                capacity: usize::MAX,
            });
            Ok(channels.len() - 1)
        };
        let external_in = inputs
            .iter()
            .map(|&p| open(p, true))
            .collect::<Result<Vec<_>, _>>()?;
        let external_out = outputs
            .iter()
            .map(|&p| open(p, false))
            .collect::<Result<Vec<_>, _>>()?;
        if in_bind.iter().chain(&out_bind).flatten().any(|&c| c == usize::MAX) {
            return Err(KernelError::Config("cluster has unbound ports".into()).into());
        }
        Ok(ActiveCluster {
            actors,
            channels,
            in_bind,
            out_bind,
            external_in,
            external_out,
        })
    }

    pub fn input_count(&self) -> usize {
        self.external_in.len()
    }

    pub fn output_count(&self) -> usize {
        self.external_out.len()
    }

    /// Feeds `inputs` and fires actors in round-robin order until nothing
    /// is enabled. Returns the drained external output streams.
    pub fn run(&mut self, inputs: &[Vec<Token>]) -> Result<Vec<Vec<Token>>, ActorError> {
        for (&c, data) in self.external_in.iter().zip(inputs) {
            self.channels[c].queue.extend(data.iter().copied());
        }
        loop {
            let mut fired = false;
            for a in 0..self.actors.len() {
                let pops: Vec<usize> = self.in_bind[a]
                    .iter()
                    .map(|&c| self.channels[c].queue.len())
                    .collect();
                let free: Vec<usize> = self.out_bind[a]
                    .iter()
                    .map(|&c| {
                        let ch = &self.channels[c];
                        ch.capacity.saturating_sub(ch.queue.len())
                    })
                    .collect();
                if !enable(self.actors[a].as_ref(), &pops, &free) {
                    continue;
                }
                let mut io = ClusterIo {
                    channels: &mut self.channels,
                    in_bind: &self.in_bind[a],
                    out_bind: &self.out_bind[a],
                };
                self.actors[a].invoke(&mut io)?;
                fired = true;
            }
            if !fired {
                break;
            }
        }
        Ok(self
            .external_out
            .iter()
            .map(|&c| self.channels[c].queue.drain(..).collect())
            .collect())
    }
}

struct ClusterIo<'a> {
    channels: &'a mut [Channel],
    in_bind: &'a [usize],
    out_bind: &'a [usize],
}

impl PortIo for ClusterIo<'_> {
    fn read(&mut self, input: usize) -> Result<Token, ActorError> {
        self.channels[self.in_bind[input]]
            .queue
            .pop_front()
            .ok_or(ActorError::Empty(input))
    }

    fn write(&mut self, output: usize, token: Token) -> Result<(), ActorError> {
        let ch = &mut self.channels[self.out_bind[output]];
        if ch.queue.len() >= ch.capacity {
            return Err(ActorError::Full(output));
        }
        ch.queue.push_back(token);
        Ok(())
    }
}

/// Writes `inputs` round-robin over the write ports (one token per port per
/// round, when admissible) and drains every read port after each round.
pub fn drive_passive(
    passive: &mut dyn PassiveUnderTest,
    inputs: &[Vec<Token>],
) -> Result<Vec<Vec<Token>>, KernelError> {
    if inputs.len() != passive.write_port_count() {
        return Err(KernelError::Config(format!(
            "{} input streams for {} write ports",
            inputs.len(),
            passive.write_port_count()
        )));
    }
    let mut cursor = vec![0usize; inputs.len()];
    let mut out = vec![Vec::new(); passive.read_port_count()];
    loop {
        let mut progress = false;
        for (p, data) in inputs.iter().enumerate() {
            if cursor[p] < data.len() && passive.write_space(p)? > 0 {
                passive.write(p, data[cursor[p]])?;
                cursor[p] += 1;
                progress = true;
            }
        }
        for (r, stream) in out.iter_mut().enumerate() {
            while passive.population(r)? > 0 {
                stream.push(passive.read(r)?);
                progress = true;
            }
        }
        if !progress {
            return Ok(out);
        }
    }
}

/// Runs both implementations on `inputs` and reports the first diverging
/// `(port, index, values)`, if any.
pub fn check_mapping_equivalence(
    active: &mut ActiveCluster,
    passive: &mut dyn PassiveUnderTest,
    inputs: &[Vec<Token>],
) -> Result<MappingReport, crate::Error> {
    if active.input_count() != inputs.len() || active.output_count() != passive.read_port_count() {
        return Err(KernelError::Config("active and passive port counts differ".into()).into());
    }
    let active_outputs = active.run(inputs)?;
    let passive_outputs = drive_passive(passive, inputs)?;
    let divergence = active_outputs
        .iter()
        .zip(&passive_outputs)
        .enumerate()
        .find_map(|(port, (a, p))| {
            first_divergence(a, p).map(|(index, active, passive)| Divergence {
                port,
                index,
                active,
                passive,
            })
        });
    Ok(MappingReport {
        active_outputs,
        passive_outputs,
        divergence,
    })
}
