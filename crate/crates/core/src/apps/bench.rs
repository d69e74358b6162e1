//! Direct-versus-passivized runs of one application graph.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{ActorLibrary, ApplicationGraph, Token};
use crate::runtime::{compare_streams, instantiate, ExecStats, IoBindings, StopCondition, StreamComparison};
use crate::transform::{derive_direct_pafg, passivize_fixpoint, PassivizationPolicy, TransformLog};

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub direct: ExecStats,
    pub optimized: ExecStats,
    pub comparison: StreamComparison,
    pub log: TransformLog,
    pub direct_streams: BTreeMap<String, Vec<Token>>,
    pub optimized_streams: BTreeMap<String, Vec<Token>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatsPair<'a> {
    pub direct: &'a ExecStats,
    pub optimized: &'a ExecStats,
}

impl BenchReport {
    pub fn stats_json(&self) -> serde_json::Value {
        serde_json::to_value(StatsPair {
            direct: &self.direct,
            optimized: &self.optimized,
        })
        .expect("stats serialize")
    }
}

/// Derives the direct PAFG of `g`, passivizes it to a fixpoint, and runs
/// both forms one after the other on the same inputs.
pub fn run_direct_and_optimized(
    g: ApplicationGraph,
    lib: &ActorLibrary,
    io: &IoBindings,
    stop: StopCondition,
) -> Result<BenchReport, crate::Error> {
    let direct = derive_direct_pafg(g, lib)?;
    let (opt, log) = passivize_fixpoint(&direct, &PassivizationPolicy::Auto)?;
    let mut d = instantiate(&direct, lib, io)?;
    let direct_stats = d.run(stop)?;
    let direct_streams = d.sink_streams();
    drop(d);
    let mut o = instantiate(&opt, lib, io)?;
    let optimized = o.run(stop)?;
    let optimized_streams = o.sink_streams();
    let comparison = compare_streams(&direct_streams, &optimized_streams)?;
    Ok(BenchReport {
        direct: direct_stats,
        optimized,
        comparison,
        log,
        direct_streams,
        optimized_streams,
    })
}
