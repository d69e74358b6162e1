//! Direct PAFG construction, the passivization rewrite and the static
//! analyses (buffer memory requirement, token-store count).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::graph::GraphError;
use crate::kernels::capacity_rule;
use crate::model::{ActorLibrary, ApplicationGraph, ModelError, TokenType};
use crate::pafg::{
    is_alternating, is_simply_surrounded, Block, BlockCategory, Coord, CoordinatedPafg,
    CoordinationFunction, Pafg, PafgError, Provenance,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pafg(#[from] PafgError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("`{block}` is not a passivization candidate: {reason}")]
    NotACandidate { block: String, reason: String },
    #[error("passivization requires an alternating PAFG")]
    NotAlternating,
    #[error("passive block `{0}` has no capacity")]
    MissingCapacity(String),
    #[error("no token count for edge {src} -> {snk}")]
    UnresolvableRate { src: String, snk: String },
}

/// Builds the direct PAFG: one `pssv` simple block per edge, one `actv`
/// actor block per actor, and each edge `e` replaced by
/// `src(e) -> block(e) -> snk(e)`.
pub fn derive_direct_pafg(
    g: impl Into<Arc<ApplicationGraph>>,
    lib: &ActorLibrary,
) -> Result<CoordinatedPafg, TransformError> {
    let g = g.into();
    let mut f = Pafg::new();
    let mut c = CoordinationFunction::new();
    for decl in g.actors() {
        let b = Block::for_actor(lib, decl)?;
        c.set(b.name.clone(), Coord::Actv);
        f.add_block(b)?;
    }
    for e in g.edges() {
        let b = Block::for_edge(e);
        let name = b.name.clone();
        c.set(name.clone(), Coord::Pssv);
        f.add_block(b)?;
        f.add_edge(&e.endpoints.src, &name)?;
        f.add_edge(&name, &e.endpoints.snk)?;
    }
    Ok(CoordinatedPafg::new(g, f, c)?)
}

/// A simply surrounded active buffer block and the sets its passivization
/// would touch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassivizationCandidate {
    pub block: String,
    /// `pred(block) ∪ succ(block)`; all simple blocks, all removed.
    pub removed: BTreeSet<String>,
    /// Predecessors of the removed predecessors.
    pub producers: BTreeSet<String>,
    /// Successors of the removed successors.
    pub consumers: BTreeSet<String>,
}

fn reject(block: &str, reason: impl Into<String>) -> TransformError {
    TransformError::NotACandidate {
        block: block.to_string(),
        reason: reason.into(),
    }
}

/// Checks that `block` can be passivized in `z` and computes its sets.
pub fn candidate(z: &CoordinatedPafg, block: &str) -> Result<PassivizationCandidate, TransformError> {
    let f = z.pafg();
    let b = f.block(block)?;
    if b.category != BlockCategory::NonSimpleBuffer {
        return Err(reject(block, "not a non-simple buffer block"));
    }
    if z.coord_of(block)? != Coord::Actv {
        return Err(reject(block, "already passive"));
    }
    if !is_simply_surrounded(f, block)? {
        return Err(reject(block, "not simply surrounded"));
    }
    let g = f.graph();
    let preds = g.pred(block)?;
    let succs = g.succ(block)?;
    if preds.is_empty() || succs.is_empty() {
        return Err(reject(block, "would become a passive interface block"));
    }
    let mut producers = BTreeSet::new();
    let mut consumers = BTreeSet::new();
    for x in preds.iter().chain(succs) {
        // simple blocks have exactly one producer and one consumer
        let (p, s) = (g.pred(x)?, g.succ(x)?);
        if p.len() != 1 || s.len() != 1 {
            return Err(TransformError::Pafg(PafgError::Inconsistent {
                block: x.clone(),
                reason: format!("simple block with {} producers and {} consumers", p.len(), s.len()),
            }));
        }
    }
    for x in preds {
        producers.extend(g.pred(x)?.iter().cloned());
    }
    for x in succs {
        consumers.extend(g.succ(x)?.iter().cloned());
    }
    Ok(PassivizationCandidate {
        block: block.to_string(),
        removed: preds.iter().chain(succs).cloned().collect(),
        producers,
        consumers,
    })
}

/// Every passivizable block, in name order.
pub fn find_candidates(z: &CoordinatedPafg) -> Vec<PassivizationCandidate> {
    z.blocks_with(Coord::Actv)
        .filter(|b| b.category == BlockCategory::NonSimpleBuffer)
        .filter_map(|b| candidate(z, &b.name).ok())
        .collect()
}

/// Record of one passivization step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassivizationStep {
    pub block: String,
    pub removed: Vec<String>,
    pub removed_edges: usize,
    pub added_edges: Vec<(String, String)>,
    pub capacity: usize,
}

impl fmt::Display for PassivizationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let added: Vec<String> = self
            .added_edges
            .iter()
            .map(|(a, b)| format!("{a}->{b}"))
            .collect();
        write!(
            f,
            "passivize {} removed={} added_edges={}",
            self.block,
            self.removed.join(","),
            added.join(",")
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformLog {
    pub steps: Vec<PassivizationStep>,
}

impl fmt::Display for TransformLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Turns the active buffer `beta` passive: its neighbouring simple blocks
/// go away and their outer neighbours connect to `beta` directly.
pub fn passivize(
    z: &CoordinatedPafg,
    beta: &str,
) -> Result<(CoordinatedPafg, PassivizationStep), TransformError> {
    if !is_alternating(z) {
        return Err(TransformError::NotAlternating);
    }
    let cand = candidate(z, beta)?;
    let f = z.pafg();
    let mut in_caps = Vec::new();
    for p in f.graph().pred(beta)? {
        let b = f.block(p)?;
        in_caps.push(b.capacity.ok_or_else(|| TransformError::MissingCapacity(p.clone()))?);
    }
    let kind = f.block(beta)?.kind.clone();
    let capacity = capacity_rule(&kind, &in_caps);

    let mut next = z.clone();
    let (nf, nc) = next.parts_mut();
    let mut removed_edges = 0;
    for x in &cand.removed {
        let g = nf.graph();
        removed_edges += g.pred(x)?.len() + g.succ(x)?.len();
        nf.remove_block(x)?;
        nc.remove(x);
    }
    let mut added_edges = Vec::new();
    for y in &cand.producers {
        nf.add_edge(y, beta)?;
        added_edges.push((y.clone(), beta.to_string()));
    }
    for y in &cand.consumers {
        nf.add_edge(beta, y)?;
        added_edges.push((beta.to_string(), y.clone()));
    }
    nf.block_mut(beta)?.capacity = Some(capacity);
    nc.set(beta, Coord::Pssv);
    next.validate()?;
    debug_assert!(is_alternating(&next));
    let step = PassivizationStep {
        block: beta.to_string(),
        removed: cand.removed.into_iter().collect(),
        removed_edges,
        added_edges,
        capacity,
    };
    Ok((next, step))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PassivizationPolicy {
    /// Repeatedly take the first candidate in name order.
    Auto,
    /// Apply exactly these blocks, in order.
    List(Vec<String>),
}

pub fn passivize_fixpoint(
    z: &CoordinatedPafg,
    policy: &PassivizationPolicy,
) -> Result<(CoordinatedPafg, TransformLog), TransformError> {
    let mut cur = z.clone();
    let mut log = TransformLog::default();
    match policy {
        PassivizationPolicy::Auto => {
            while let Some(c) = find_candidates(&cur).into_iter().next() {
                let (n, step) = passivize(&cur, &c.block)?;
                cur = n;
                log.steps.push(step);
            }
        }
        PassivizationPolicy::List(blocks) => {
            for b in blocks {
                let (n, step) = passivize(&cur, b)?;
                cur = n;
                log.steps.push(step);
            }
        }
    }
    Ok((cur, log))
}

/// Byte size of every passive block and their sum.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BmrReport {
    pub per_block: BTreeMap<String, u64>,
    pub total_bytes: u64,
}

pub fn compute_bmr(z: &CoordinatedPafg) -> Result<BmrReport, TransformError> {
    let mut report = BmrReport::default();
    for b in z.blocks_with(Coord::Pssv) {
        let cap = b
            .capacity
            .ok_or_else(|| TransformError::MissingCapacity(b.name.clone()))?;
        // f64 and i64 tokens are both 8 bytes
        let bytes = cap as u64 * TokenType::F64.size_bytes();
        report.per_block.insert(b.name.clone(), bytes);
        report.total_bytes += bytes;
    }
    Ok(report)
}

/// Tokens carried per iteration by each application-graph edge, keyed by
/// `(src actor, snk actor)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenProfile(BTreeMap<(String, String), u64>);

impl TokenProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, src: &str, snk: &str, tokens: u64) {
        self.0.insert((src.to_string(), snk.to_string()), tokens);
    }

    pub fn get(&self, src: &str, snk: &str) -> Option<u64> {
        self.0.get(&(src.to_string(), snk.to_string())).copied()
    }
}

/// Token-store operations into passive-block memory per iteration.
///
/// An active block stores once per token it sends into a passive block,
/// so an active fork with fanout m stores m times per input token, while a
/// passive fork adds no stores beyond its producer's.
pub fn estimate_copy_count(z: &CoordinatedPafg, profile: &TokenProfile) -> Result<u64, TransformError> {
    let f = z.pafg();
    let mut total = 0u64;
    for e in f.graph().edges() {
        if z.coord_of(&e.src)? != Coord::Actv {
            continue;
        }
        let dst = f.block(&e.snk)?;
        let (src_actor, snk_actor) = match &dst.provenance {
            Provenance::Edge(r) => (r.src.clone(), r.snk.clone()),
            Provenance::Actor(w) => {
                let v = f
                    .block(&e.src)?
                    .actor()
                    .ok_or_else(|| PafgError::Inconsistent {
                        block: e.src.clone(),
                        reason: "active block without actor provenance".into(),
                    })?
                    .to_string();
                (v, w.clone())
            }
        };
        total += profile.get(&src_actor, &snk_actor).ok_or(TransformError::UnresolvableRate {
            src: src_actor,
            snk: snk_actor,
        })?;
    }
    Ok(total)
}
