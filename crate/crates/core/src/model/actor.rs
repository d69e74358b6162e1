use std::collections::BTreeMap;

use thiserror::Error;

use super::{ModelError, PortLayout, Token, TokenType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActorError {
    #[error("read from empty input port {0}")]
    Empty(usize),
    #[error("write to full output port {0}")]
    Full(usize),
    #[error("port {port}: expected {expected} token, got {got}")]
    TypeMismatch {
        port: usize,
        expected: TokenType,
        got: TokenType,
    },
    #[error("invalid token: {0}")]
    InvalidToken(String),
    #[error("{0}")]
    Io(String),
}

/// Consumption and production counts of the current mode, indexed like the
/// actor's [`PortLayout`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rates {
    pub consume: Vec<usize>,
    pub produce: Vec<usize>,
    /// `false` once the actor can never fire again (e.g. exhausted source).
    pub fireable: bool,
}

impl Rates {
    pub fn new(consume: Vec<usize>, produce: Vec<usize>) -> Self {
        Rates {
            consume,
            produce,
            fireable: true,
        }
    }

    pub fn halted(inputs: usize, outputs: usize) -> Self {
        Rates {
            consume: vec![0; inputs],
            produce: vec![0; outputs],
            fireable: false,
        }
    }
}

/// Access to the buffers bound to an actor's ports during one firing.
pub trait PortIo {
    fn read(&mut self, input: usize) -> Result<Token, ActorError>;
    fn write(&mut self, output: usize, token: Token) -> Result<(), ActorError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoRole {
    None,
    Source,
    Sink,
}

/// Core-functional-dataflow actor: a finite set of modes, fixed rates per
/// mode, and an `invoke` that returns the next mode.
pub trait CfdfActor: Send {
    fn name(&self) -> &str;
    fn kind(&self) -> &str;
    fn layout(&self) -> &PortLayout;
    fn mode_names(&self) -> &'static [&'static str];
    fn mode(&self) -> usize;
    /// Rates for the current mode. Must not change between `invoke` calls.
    fn rates(&self) -> &Rates;
    /// Fires once in the current mode and returns the next mode.
    fn invoke(&mut self, io: &mut dyn PortIo) -> Result<usize, ActorError>;

    fn io_role(&self) -> IoRole {
        IoRole::None
    }

    /// Supplies the finite input stream of a source actor.
    fn bind_input(&mut self, _data: Vec<Token>) -> Result<(), ActorError> {
        Err(ActorError::Io(format!("actor `{}` takes no input stream", self.name())))
    }

    /// Tokens collected by a sink actor.
    fn sink_output(&self) -> Option<&[Token]> {
        None
    }
}

/// Firing-rule test against buffer occupancy, indexed by port position.
///
/// `populations[i]` is the number of tokens available on input `i` and
/// `free_space[j]` the number of slots writable on output `j`.
pub fn enable(actor: &dyn CfdfActor, populations: &[usize], free_space: &[usize]) -> bool {
    let r = actor.rates();
    r.fireable
        && r.consume.iter().zip(populations).all(|(need, have)| have >= need)
        && r.produce.iter().zip(free_space).all(|(need, have)| have >= need)
}

/// [`enable`] keyed by port name. Every port of the actor must be reported.
pub fn enable_named(
    actor: &dyn CfdfActor,
    populations: &BTreeMap<String, usize>,
    free_space: &BTreeMap<String, usize>,
) -> Result<bool, ModelError> {
    let layout = actor.layout();
    let unknown = |port: &String| ModelError::UnknownPort {
        actor: actor.name().to_string(),
        port: port.clone(),
    };
    for p in populations.keys() {
        layout.input_index(p).ok_or_else(|| unknown(p))?;
    }
    for p in free_space.keys() {
        layout.output_index(p).ok_or_else(|| unknown(p))?;
    }
    let pops = layout
        .inputs
        .iter()
        .map(|s| populations.get(&s.name).copied().ok_or_else(|| unknown(&s.name)))
        .collect::<Result<Vec<_>, _>>()?;
    let free = layout
        .outputs
        .iter()
        .map(|s| free_space.get(&s.name).copied().ok_or_else(|| unknown(&s.name)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(enable(actor, &pops, &free))
}
