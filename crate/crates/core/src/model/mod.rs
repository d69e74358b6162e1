//! Application-graph layer: tokens, dataflow edges, actor declarations and
//! the CFDF actor contract.

mod actor;
mod actors;
mod library;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError};

pub use actor::{enable, enable_named, ActorError, CfdfActor, IoRole, PortIo, Rates};
pub use library::{ActiveFactory, ActorLibrary, KindEntry, PassiveFactory, PortLayout, PortSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown actor kind `{0}`")]
    UnknownKind(String),
    #[error("unknown actor `{0}`")]
    UnknownActor(String),
    #[error("actor `{0}` already declared")]
    DuplicateActor(String),
    #[error("invalid actor name `{0}` (expected [A-Za-z0-9_-]+)")]
    InvalidName(String),
    #[error("actor `{actor}` has no port `{port}`")]
    UnknownPort { actor: String, port: String },
    #[error("port `{actor}.{port}` is already bound to an edge")]
    PortAlreadyBound { actor: String, port: String },
    #[error("actor `{actor}`: bad parameter `{key}`: {reason}")]
    BadParam {
        actor: String,
        key: String,
        reason: String,
    },
    #[error("edge {edge} carries {edge_type} but port `{port}` expects {port_type}")]
    TypeMismatch {
        edge: String,
        port: String,
        edge_type: TokenType,
        port_type: TokenType,
    },
    #[error("edge capacity must be at least 1 (edge {0})")]
    ZeroCapacity(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenType {
    F64,
    I64,
}

impl fmt::Display for TokenType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenType::F64 => "f64",
            TokenType::I64 => "i64",
        })
    }
}

impl FromStr for TokenType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" => Ok(TokenType::F64),
            "i64" => Ok(TokenType::I64),
            other => Err(format!("unknown token type `{other}`")),
        }
    }
}

impl TokenType {
    /// Storage size of one token of this type.
    pub const fn size_bytes(self) -> u64 {
        8
    }
}

/// One unit of data on a dataflow edge.
///
/// Equality is bit-exact for floating-point samples, so `NaN == NaN` when
/// the payloads match and `0.0 != -0.0`.
#[derive(Debug, Clone, Copy)]
pub enum Token {
    F64(f64),
    I64(i64),
}

impl Token {
    pub fn token_type(self) -> TokenType {
        match self {
            Token::F64(_) => TokenType::F64,
            Token::I64(_) => TokenType::I64,
        }
    }

    pub fn as_f64(self) -> Option<f64> {
        match self {
            Token::F64(x) => Some(x),
            Token::I64(_) => None,
        }
    }

    pub fn as_i64(self) -> Option<i64> {
        match self {
            Token::I64(n) => Some(n),
            Token::F64(_) => None,
        }
    }
}

impl Default for Token {
    fn default() -> Self {
        Token::F64(0.0)
    }
}

impl PartialEq for Token {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Token::F64(a), Token::F64(b)) => a.to_bits() == b.to_bits(),
            (Token::I64(a), Token::I64(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Token {}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::F64(x) => write!(f, "{x:?}"),
            Token::I64(n) => write!(f, "{n}"),
        }
    }
}

impl From<f64> for Token {
    fn from(x: f64) -> Self {
        Token::F64(x)
    }
}

impl From<i64> for Token {
    fn from(n: i64) -> Self {
        Token::I64(n)
    }
}

/// Gain-fork write transform. Mixed operands promote to `f64`.
impl std::ops::Mul for Token {
    type Output = Token;

    fn mul(self, rhs: Token) -> Token {
        match (self, rhs) {
            (Token::F64(a), Token::F64(b)) => Token::F64(a * b),
            (Token::I64(a), Token::I64(b)) => Token::I64(a.wrapping_mul(b)),
            (Token::F64(a), Token::I64(b)) => Token::F64(a * b as f64),
            (Token::I64(a), Token::F64(b)) => Token::F64(a as f64 * b),
        }
    }
}

/// Construction-time actor parameters, kept verbatim so files round-trip.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.0.insert(key.into(), value.to_string());
        self
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) -> Option<String> {
        self.0.insert(key.into(), value.into())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn parse_or<T: FromStr>(
        &self,
        actor: &str,
        key: &str,
        default: T,
    ) -> Result<T, ModelError>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|e: T::Err| ModelError::BadParam {
                actor: actor.to_string(),
                key: key.to_string(),
                reason: e.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorDecl {
    pub name: String,
    pub kind: String,
    pub params: Params,
}

impl ActorDecl {
    pub fn new(name: impl Into<String>, kind: impl Into<String>) -> Self {
        ActorDecl {
            name: name.into(),
            kind: kind.into(),
            params: Params::new(),
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params = self.params.with(key, value);
        self
    }
}

/// Port-qualified reference to a dataflow edge, printed as
/// `src.port->snk.port`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub src: String,
    pub src_port: String,
    pub snk: String,
    pub snk_port: String,
}

impl EdgeRef {
    pub fn new(
        src: impl Into<String>,
        src_port: impl Into<String>,
        snk: impl Into<String>,
        snk_port: impl Into<String>,
    ) -> Self {
        EdgeRef {
            src: src.into(),
            src_port: src_port.into(),
            snk: snk.into(),
            snk_port: snk_port.into(),
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{}->{}.{}",
            self.src, self.src_port, self.snk, self.snk_port
        )
    }
}

impl FromStr for EdgeRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lhs, rhs) = s
            .split_once("->")
            .ok_or_else(|| format!("expected `src.port->dst.port`, found `{s}`"))?;
        let split = |side: &str| {
            side.split_once('.')
                .filter(|(a, p)| !a.is_empty() && !p.is_empty())
                .map(|(a, p)| (a.to_string(), p.to_string()))
                .ok_or_else(|| format!("expected `actor.port`, found `{side}`"))
        };
        let (src, src_port) = split(lhs)?;
        let (snk, snk_port) = split(rhs)?;
        Ok(EdgeRef {
            src,
            src_port,
            snk,
            snk_port,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataflowEdge {
    pub endpoints: EdgeRef,
    pub capacity: usize,
    pub token_type: TokenType,
}

impl DataflowEdge {
    pub fn new(endpoints: EdgeRef, capacity: usize, token_type: TokenType) -> Self {
        DataflowEdge {
            endpoints,
            capacity,
            token_type,
        }
    }
}

pub(crate) fn valid_actor_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// A dataflow application graph: a [`DirectedGraph`] over actor names with
/// actor declarations on vertices and FIFO metadata on edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ApplicationGraph {
    graph: DirectedGraph,
    actors: BTreeMap<String, ActorDecl>,
    edges: BTreeMap<(String, String), DataflowEdge>,
    // (actor, port) already bound; `true` for inputs
    bound: BTreeMap<(String, String, bool), (String, String)>,
}

impl ApplicationGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_actor(&mut self, lib: &ActorLibrary, decl: ActorDecl) -> Result<(), ModelError> {
        if !valid_actor_name(&decl.name) {
            return Err(ModelError::InvalidName(decl.name));
        }
        if self.actors.contains_key(&decl.name) {
            return Err(ModelError::DuplicateActor(decl.name));
        }
        // rejects unknown kinds and malformed parameters up front
        lib.layout(&decl)?;
        self.graph.add_vertex(decl.name.clone())?;
        self.actors.insert(decl.name.clone(), decl);
        Ok(())
    }

    pub fn add_edge(&mut self, lib: &ActorLibrary, edge: DataflowEdge) -> Result<(), ModelError> {
        let ep = &edge.endpoints;
        if edge.capacity == 0 {
            return Err(ModelError::ZeroCapacity(ep.label()));
        }
        let src = self
            .actors
            .get(&ep.src)
            .ok_or_else(|| ModelError::Graph(GraphError::UnknownEndpoint(ep.src.clone())))?;
        let snk = self
            .actors
            .get(&ep.snk)
            .ok_or_else(|| ModelError::Graph(GraphError::UnknownEndpoint(ep.snk.clone())))?;
        if ep.src == ep.snk {
            return Err(GraphError::SelfLoop(ep.src.clone()).into());
        }
        let out_spec = lib
            .layout(src)?
            .output(&ep.src_port)
            .cloned()
            .ok_or_else(|| ModelError::UnknownPort {
                actor: ep.src.clone(),
                port: ep.src_port.clone(),
            })?;
        let in_spec = lib
            .layout(snk)?
            .input(&ep.snk_port)
            .cloned()
            .ok_or_else(|| ModelError::UnknownPort {
                actor: ep.snk.clone(),
                port: ep.snk_port.clone(),
            })?;
        for spec in [&out_spec, &in_spec] {
            if let Some(ty) = spec.ty {
                if ty != edge.token_type {
                    return Err(ModelError::TypeMismatch {
                        edge: ep.label(),
                        port: spec.name.clone(),
                        edge_type: edge.token_type,
                        port_type: ty,
                    });
                }
            }
        }
        for (actor, port, input) in [
            (&ep.src, &ep.src_port, false),
            (&ep.snk, &ep.snk_port, true),
        ] {
            if self
                .bound
                .contains_key(&(actor.clone(), port.clone(), input))
            {
                return Err(ModelError::PortAlreadyBound {
                    actor: actor.clone(),
                    port: port.clone(),
                });
            }
        }
        self.graph.add_edge(&ep.src, &ep.snk)?;
        let pair = (ep.src.clone(), ep.snk.clone());
        self.bound.insert(
            (ep.src.clone(), ep.src_port.clone(), false),
            pair.clone(),
        );
        self.bound
            .insert((ep.snk.clone(), ep.snk_port.clone(), true), pair.clone());
        self.edges.insert(pair, edge);
        Ok(())
    }

    /// Convenience wrapper over [`ApplicationGraph::add_edge`].
    pub fn connect(
        &mut self,
        lib: &ActorLibrary,
        src: &str,
        src_port: &str,
        snk: &str,
        snk_port: &str,
        capacity: usize,
        token_type: TokenType,
    ) -> Result<(), ModelError> {
        self.add_edge(
            lib,
            DataflowEdge::new(EdgeRef::new(src, src_port, snk, snk_port), capacity, token_type),
        )
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn actor(&self, name: &str) -> Option<&ActorDecl> {
        self.actors.get(name)
    }

    pub fn actors(&self) -> impl Iterator<Item = &ActorDecl> {
        self.actors.values()
    }

    pub fn actor_count(&self) -> usize {
        self.actors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges ordered by `(src, snk)`.
    pub fn edges(&self) -> impl Iterator<Item = &DataflowEdge> {
        self.edges.values()
    }

    pub fn edge_between(&self, src: &str, snk: &str) -> Option<&DataflowEdge> {
        self.edges.get(&(src.to_string(), snk.to_string()))
    }

    /// Looks up an edge by its full port-qualified reference.
    pub fn edge(&self, r: &EdgeRef) -> Option<&DataflowEdge> {
        self.edge_between(&r.src, &r.snk)
            .filter(|e| e.endpoints == *r)
    }

    /// The edge feeding input `port` of `actor`, if bound.
    pub fn edge_into(&self, actor: &str, port: &str) -> Option<&DataflowEdge> {
        self.bound
            .get(&(actor.to_string(), port.to_string(), true))
            .and_then(|pair| self.edges.get(pair))
    }

    /// The edge leaving output `port` of `actor`, if bound.
    pub fn edge_from(&self, actor: &str, port: &str) -> Option<&DataflowEdge> {
        self.bound
            .get(&(actor.to_string(), port.to_string(), false))
            .and_then(|pair| self.edges.get(pair))
    }
}
