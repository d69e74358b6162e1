//! Directed-graph substrate shared by application graphs and PAFGs.
//!
//! Vertices are opaque string identifiers. The graph is simple: no
//! self-loops and at most one edge per ordered vertex pair. All iteration is
//! lexicographic over vertex identifiers so every pass built on top of it is
//! deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex `{0}` already exists")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop on `{0}` is not allowed")]
    SelfLoop(String),
    #[error("edge endpoint `{0}` is not a vertex")]
    UnknownEndpoint(String),
    #[error("edge {0} already exists")]
    DuplicateEdge(Edge),
    #[error("edge {0} does not exist")]
    UnknownEdge(Edge),
}

/// An ordered vertex pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: String,
    pub snk: String,
}

impl Edge {
    pub fn new(src: impl Into<String>, snk: impl Into<String>) -> Self {
        Edge {
            src: src.into(),
            snk: snk.into(),
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} -> {})", self.src, self.snk)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectedGraph {
    // vertex -> successors / predecessors; the key set is the vertex set
    succ: BTreeMap<String, BTreeSet<String>>,
    pred: BTreeMap<String, BTreeSet<String>>,
    edge_count: usize,
}

impl DirectedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: impl Into<String>) -> Result<(), GraphError> {
        let v = v.into();
        if self.succ.contains_key(&v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        self.succ.insert(v.clone(), BTreeSet::new());
        self.pred.insert(v, BTreeSet::new());
        Ok(())
    }

    /// Removes `v` together with every edge incident to it.
    pub fn remove_vertex(&mut self, v: &str) -> Result<(), GraphError> {
        let out = self
            .succ
            .remove(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))?;
        let inc = self.pred.remove(v).unwrap_or_default();
        for s in &out {
            if let Some(set) = self.pred.get_mut(s) {
                set.remove(v);
            }
        }
        for p in &inc {
            if let Some(set) = self.succ.get_mut(p) {
                set.remove(v);
            }
        }
        self.edge_count -= out.len() + inc.len();
        Ok(())
    }

    pub fn add_edge(&mut self, src: &str, snk: &str) -> Result<(), GraphError> {
        if src == snk {
            return Err(GraphError::SelfLoop(src.to_string()));
        }
        for end in [src, snk] {
            if !self.succ.contains_key(end) {
                return Err(GraphError::UnknownEndpoint(end.to_string()));
            }
        }
        let out = self.succ.get_mut(src).expect("checked above");
        if !out.insert(snk.to_string()) {
            return Err(GraphError::DuplicateEdge(Edge::new(src, snk)));
        }
        self.pred
            .get_mut(snk)
            .expect("checked above")
            .insert(src.to_string());
        self.edge_count += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, src: &str, snk: &str) -> Result<(), GraphError> {
        let removed = self
            .succ
            .get_mut(src)
            .map(|s| s.remove(snk))
            .unwrap_or(false);
        if !removed {
            return Err(GraphError::UnknownEdge(Edge::new(src, snk)));
        }
        if let Some(p) = self.pred.get_mut(snk) {
            p.remove(src);
        }
        self.edge_count -= 1;
        Ok(())
    }

    pub fn contains_vertex(&self, v: &str) -> bool {
        self.succ.contains_key(v)
    }

    pub fn contains_edge(&self, src: &str, snk: &str) -> bool {
        self.succ.get(src).is_some_and(|s| s.contains(snk))
    }

    pub fn vertex_count(&self) -> usize {
        self.succ.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> + '_ {
        self.succ.keys().map(String::as_str)
    }

    /// All edges, ordered by `(src, snk)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.succ
            .iter()
            .flat_map(|(s, outs)| outs.iter().map(move |t| Edge::new(s.clone(), t.clone())))
    }

    pub fn pred(&self, v: &str) -> Result<&BTreeSet<String>, GraphError> {
        self.pred
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
    }

    pub fn succ(&self, v: &str) -> Result<&BTreeSet<String>, GraphError> {
        self.succ
            .get(v)
            .ok_or_else(|| GraphError::UnknownVertex(v.to_string()))
    }

    pub fn in_edges(&self, v: &str) -> Result<Vec<Edge>, GraphError> {
        Ok(self
            .pred(v)?
            .iter()
            .map(|p| Edge::new(p.clone(), v))
            .collect())
    }

    pub fn out_edges(&self, v: &str) -> Result<Vec<Edge>, GraphError> {
        Ok(self
            .succ(v)?
            .iter()
            .map(|s| Edge::new(v, s.clone()))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(vs: &[&str], es: &[(&str, &str)]) -> DirectedGraph {
        let mut g = DirectedGraph::new();
        for v in vs {
            g.add_vertex(*v).unwrap();
        }
        for (s, t) in es {
            g.add_edge(s, t).unwrap();
        }
        g
    }

    #[test]
    fn add_vertex_cases() {
        let mut g = DirectedGraph::new();
        g.add_vertex("A").unwrap();
        assert_eq!(g.vertices().collect::<Vec<_>>(), ["A"]);
        assert_eq!(g.edge_count(), 0);
        g.add_vertex("B").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(
            g.add_vertex("A"),
            Err(GraphError::DuplicateVertex("A".into()))
        );
    }

    #[test]
    fn add_edge_cases() {
        let mut g = graph(&["A", "B"], &[]);
        g.add_edge("A", "B").unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), [Edge::new("A", "B")]);
        assert_eq!(g.add_edge("A", "A"), Err(GraphError::SelfLoop("A".into())));
        assert_eq!(
            g.add_edge("A", "C"),
            Err(GraphError::UnknownEndpoint("C".into()))
        );
        assert!(matches!(
            g.add_edge("A", "B"),
            Err(GraphError::DuplicateEdge(_))
        ));
    }

    #[test]
    fn adjacency_queries() {
        let g = graph(&["A", "B", "C", "D"], &[("A", "B"), ("B", "C")]);
        assert_eq!(g.pred("B").unwrap().iter().collect::<Vec<_>>(), ["A"]);
        assert_eq!(g.succ("B").unwrap().iter().collect::<Vec<_>>(), ["C"]);
        assert!(g.pred("D").unwrap().is_empty());
        assert!(g.succ("D").unwrap().is_empty());
        assert!(matches!(g.pred("Q"), Err(GraphError::UnknownVertex(_))));

        let fork = graph(&["A", "B", "C"], &[("A", "B"), ("A", "C")]);
        assert_eq!(fork.succ("A").unwrap().len(), 2);
        assert_eq!(fork.out_edges("A").unwrap().len(), 2);
    }

    #[test]
    fn remove_vertex_drops_incident_edges() {
        let mut g = graph(&["A", "B", "C"], &[("A", "B"), ("B", "C"), ("A", "C")]);
        g.remove_vertex("B").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.contains_edge("A", "C"));
        assert!(g.pred("C").unwrap().iter().eq(["A"].iter()));
    }
}
