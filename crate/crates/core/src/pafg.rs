//! Passive-active flow graphs: blocks, coordination functions and the
//! structural checks over them.
//!
//! Every block is classified three ways. Simple blocks come from dataflow
//! edges and are always passive. Non-simple blocks come from actors and are
//! either computational (always active) or buffer blocks, whose execution
//! style is chosen by the coordination function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError};
use crate::model::{ActorDecl, ActorLibrary, ApplicationGraph, DataflowEdge, EdgeRef, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PafgError {
    #[error("unknown block `{0}`")]
    UnknownBlock(String),
    #[error("block `{0}` already exists")]
    DuplicateBlock(String),
    #[error("no coordination type for block `{0}`")]
    MissingCoordination(String),
    #[error("coordination names `{0}`, which is not a block")]
    ExtraCoordination(String),
    #[error("simple block `{0}` must be coordinated pssv")]
    SimpleNotPassive(String),
    #[error("computational block `{0}` must be coordinated actv")]
    ComputationalNotActive(String),
    #[error("block `{0}` is a passive interface block, which is unsupported")]
    PassiveInterface(String),
    #[error("blocks `{0}` and `{1}` share a provenance target")]
    DuplicateProvenance(String, String),
    #[error("passive block `{0}` has no capacity")]
    MissingCapacity(String),
    #[error("block `{block}` refers to {target}, which is not in the application graph")]
    DanglingProvenance { block: String, target: String },
    #[error("block `{block}`: {reason}")]
    Inconsistent { block: String, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Pssv,
    Actv,
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coord::Pssv => "pssv",
            Coord::Actv => "actv",
        })
    }
}

impl FromStr for Coord {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pssv" => Ok(Coord::Pssv),
            "actv" => Ok(Coord::Actv),
            other => Err(format!("unknown coordination type `{other}`")),
        }
    }
}

/// What a block stands for in its application graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Actor(String),
    Edge(EdgeRef),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Actor(a) => write!(f, "actor:{a}"),
            Provenance::Edge(e) => write!(f, "edge:{e}"),
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(a) = s.strip_prefix("actor:") {
            if a.is_empty() {
                return Err("empty actor provenance".into());
            }
            Ok(Provenance::Actor(a.to_string()))
        } else if let Some(e) = s.strip_prefix("edge:") {
            Ok(Provenance::Edge(e.parse()?))
        } else {
            Err(format!("provenance must start with `actor:` or `edge:`, found `{s}`"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockCategory {
    SimplePassiveBuffer,
    Computational,
    NonSimpleBuffer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub provenance: Provenance,
    pub category: BlockCategory,
    /// Actor kind for non-simple blocks, `"simple"` otherwise.
    pub kind: String,
    /// Token capacity; set for every simple block and for passivized
    /// buffer blocks.
    pub capacity: Option<usize>,
}

impl Block {
    pub const SIMPLE_KIND: &'static str = "simple";

    /// The simple passive buffer of `edge`, named by its edge label.
    pub fn for_edge(edge: &DataflowEdge) -> Self {
        Block {
            name: edge.endpoints.label(),
            provenance: Provenance::Edge(edge.endpoints.clone()),
            category: BlockCategory::SimplePassiveBuffer,
            kind: Self::SIMPLE_KIND.to_string(),
            capacity: Some(edge.capacity),
        }
    }

    /// The actor block of `decl`; its category comes from the library.
    pub fn for_actor(lib: &ActorLibrary, decl: &ActorDecl) -> Result<Self, ModelError> {
        let category = if lib.is_buffer_actor(&decl.kind)? {
            BlockCategory::NonSimpleBuffer
        } else {
            BlockCategory::Computational
        };
        Ok(Block {
            name: decl.name.clone(),
            provenance: Provenance::Actor(decl.name.clone()),
            category,
            kind: decl.kind.clone(),
            capacity: None,
        })
    }

    pub fn is_simple(&self) -> bool {
        self.category == BlockCategory::SimplePassiveBuffer
    }

    pub fn is_buffer(&self) -> bool {
        self.category != BlockCategory::Computational
    }

    /// The actor this block stands for, if non-simple.
    pub fn actor(&self) -> Option<&str> {
        match &self.provenance {
            Provenance::Actor(a) => Some(a),
            Provenance::Edge(_) => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pafg {
    graph: DirectedGraph,
    blocks: BTreeMap<String, Block>,
}

impl Pafg {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_block(&mut self, block: Block) -> Result<(), PafgError> {
        if self.blocks.contains_key(&block.name) {
            return Err(PafgError::DuplicateBlock(block.name));
        }
        self.graph.add_vertex(block.name.clone())?;
        self.blocks.insert(block.name.clone(), block);
        Ok(())
    }

    pub fn remove_block(&mut self, name: &str) -> Result<Block, PafgError> {
        let b = self
            .blocks
            .remove(name)
            .ok_or_else(|| PafgError::UnknownBlock(name.to_string()))?;
        self.graph.remove_vertex(name)?;
        Ok(b)
    }

    pub fn add_edge(&mut self, src: &str, snk: &str) -> Result<(), PafgError> {
        Ok(self.graph.add_edge(src, snk)?)
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn block(&self, name: &str) -> Result<&Block, PafgError> {
        self.blocks
            .get(name)
            .ok_or_else(|| PafgError::UnknownBlock(name.to_string()))
    }

    pub(crate) fn block_mut(&mut self, name: &str) -> Result<&mut Block, PafgError> {
        self.blocks
            .get_mut(name)
            .ok_or_else(|| PafgError::UnknownBlock(name.to_string()))
    }

    /// Blocks in name order.
    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.values()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }
}

/// Total map from block names to `pssv`/`actv`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoordinationFunction(BTreeMap<String, Coord>);

impl CoordinationFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, block: impl Into<String>, c: Coord) {
        self.0.insert(block.into(), c);
    }

    pub fn get(&self, block: &str) -> Option<Coord> {
        self.0.get(block).copied()
    }

    pub(crate) fn remove(&mut self, block: &str) {
        self.0.remove(block);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Coord)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

impl FromIterator<(String, Coord)> for CoordinationFunction {
    fn from_iter<I: IntoIterator<Item = (String, Coord)>>(iter: I) -> Self {
        CoordinationFunction(iter.into_iter().collect())
    }
}

/// A PAFG with its coordination function and the application graph it
/// was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinatedPafg {
    source: Arc<ApplicationGraph>,
    pafg: Pafg,
    coord: CoordinationFunction,
}

impl CoordinatedPafg {
    /// Validates coordination totality and the typing rules, provenance
    /// injectivity, capacities of passive blocks, association with
    /// `source`, and the absence of passive interface blocks.
    pub fn new(
        source: Arc<ApplicationGraph>,
        pafg: Pafg,
        coord: CoordinationFunction,
    ) -> Result<Self, PafgError> {
        let z = CoordinatedPafg {
            source,
            pafg,
            coord,
        };
        z.validate()?;
        Ok(z)
    }

    pub fn validate(&self) -> Result<(), PafgError> {
        for (name, _) in self.coord.iter() {
            if self.pafg.block(name).is_err() {
                return Err(PafgError::ExtraCoordination(name.to_string()));
            }
        }
        let mut targets: BTreeMap<&Provenance, &str> = BTreeMap::new();
        for b in self.pafg.blocks() {
            let c = self
                .coord
                .get(&b.name)
                .ok_or_else(|| PafgError::MissingCoordination(b.name.clone()))?;
            match (b.category, c) {
                (BlockCategory::SimplePassiveBuffer, Coord::Actv) => {
                    return Err(PafgError::SimpleNotPassive(b.name.clone()))
                }
                (BlockCategory::Computational, Coord::Pssv) => {
                    return Err(PafgError::ComputationalNotActive(b.name.clone()))
                }
                _ => {}
            }
            if c == Coord::Pssv {
                if b.capacity.is_none() {
                    return Err(PafgError::MissingCapacity(b.name.clone()));
                }
                if is_interface_block(&self.pafg, &b.name)? {
                    return Err(PafgError::PassiveInterface(b.name.clone()));
                }
            }
            if let Some(other) = targets.insert(&b.provenance, &b.name) {
                return Err(PafgError::DuplicateProvenance(
                    other.to_string(),
                    b.name.clone(),
                ));
            }
        }
        verify_association(&self.source, &self.pafg)
    }

    pub fn source(&self) -> &ApplicationGraph {
        &self.source
    }

    pub fn source_arc(&self) -> &Arc<ApplicationGraph> {
        &self.source
    }

    pub fn pafg(&self) -> &Pafg {
        &self.pafg
    }

    pub fn coord(&self) -> &CoordinationFunction {
        &self.coord
    }

    /// Coordination type of `block`.
    pub fn coord_of(&self, block: &str) -> Result<Coord, PafgError> {
        self.coord
            .get(block)
            .ok_or_else(|| PafgError::UnknownBlock(block.to_string()))
    }

    pub fn blocks_with(&self, c: Coord) -> impl Iterator<Item = &Block> + '_ {
        self.pafg
            .blocks()
            .filter(move |b| self.coord.get(&b.name) == Some(c))
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Pafg, &mut CoordinationFunction) {
        (&mut self.pafg, &mut self.coord)
    }
}

/// Every edge joins one `actv` and one `pssv` block.
pub fn is_alternating(z: &CoordinatedPafg) -> bool {
    z.pafg
        .graph
        .edges()
        .all(|e| z.coord.get(&e.src) != z.coord.get(&e.snk))
}

/// No edge joins two `pssv` blocks.
pub fn check_abc(z: &CoordinatedPafg) -> bool {
    z.pafg.graph.edges().all(|e| {
        !(z.coord.get(&e.src) == Some(Coord::Pssv) && z.coord.get(&e.snk) == Some(Coord::Pssv))
    })
}

pub fn is_interface_block(f: &Pafg, b: &str) -> Result<bool, PafgError> {
    let g = f.graph();
    Ok(g.pred(b)?.is_empty() || g.succ(b)?.is_empty())
}

/// All predecessors and successors of `b` are simple passive buffers.
pub fn is_simply_surrounded(f: &Pafg, b: &str) -> Result<bool, PafgError> {
    let g = f.graph();
    let neighbours: BTreeSet<&String> = g.pred(b)?.iter().chain(g.succ(b)?).collect();
    Ok(neighbours
        .into_iter()
        .all(|n| f.blocks.get(n).is_some_and(Block::is_simple)))
}

/// Checks that every simple block of `f` stands for an edge of `g` and
/// every non-simple block for an actor of `g`, injectively.
pub fn verify_association(g: &ApplicationGraph, f: &Pafg) -> Result<(), PafgError> {
    let mut seen = BTreeMap::new();
    for b in f.blocks() {
        match (&b.provenance, b.category) {
            (Provenance::Edge(e), BlockCategory::SimplePassiveBuffer) => {
                if g.edge(e).is_none() {
                    return Err(PafgError::DanglingProvenance {
                        block: b.name.clone(),
                        target: format!("edge {e}"),
                    });
                }
            }
            (Provenance::Actor(a), BlockCategory::Computational | BlockCategory::NonSimpleBuffer) => {
                let decl = g.actor(a).ok_or_else(|| PafgError::DanglingProvenance {
                    block: b.name.clone(),
                    target: format!("actor {a}"),
                })?;
                if decl.kind != b.kind {
                    return Err(PafgError::Inconsistent {
                        block: b.name.clone(),
                        reason: format!("kind `{}` but actor `{a}` is `{}`", b.kind, decl.kind),
                    });
                }
            }
            _ => {
                return Err(PafgError::Inconsistent {
                    block: b.name.clone(),
                    reason: "simple blocks need edge provenance, non-simple blocks actor provenance"
                        .into(),
                })
            }
        }
        if let Some(prev) = seen.insert(&b.provenance, &b.name) {
            return Err(PafgError::DuplicateProvenance(prev.clone(), b.name.clone()));
        }
    }
    Ok(())
}

pub fn check_association(g: &ApplicationGraph, f: &Pafg) -> bool {
    verify_association(g, f).is_ok()
}
