//! Per-predicate subgraph extraction.
//!
//! A depth-first walk copies the graph into a set of subgraphs, each rooted
//! at a semantic unit:
//!
//! - Rule 1 (core concept): a core concept with more than `sigma` arguments
//!   is cut out as its own subgraph; the parent keeps a concept-only stub.
//! - Rule 2 (revisit): a node visited before keeps only its non-core
//!   relations (names, values) on later copies.
//! - Rule 3 (inverse relations, optional): inverse edges are reversed and
//!   their predicate endpoints become subgraph roots of their own.
//!
//! The visited set is shared across the whole run, so a concept's relations
//! are extracted in full exactly once.

use std::collections::{HashSet, VecDeque};

use indexmap::IndexMap;

use crate::graph::{
    argument_count, classify_role, deinvert, is_core_concept, AmrGraph, Edge, GraphError, Target,
    Var,
};

/// Splitting parameters. `sigma` is the argument-count threshold of Rule 1;
/// `apply_rule3` toggles inverse-relation extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitConfig {
    pub sigma: usize,
    pub apply_rule3: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { sigma: 2, apply_rule3: true }
    }
}

/// Why a subgraph root was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    OriginalRoot,
    Rule1,
    Rule3,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::OriginalRoot => "original-root",
            Origin::Rule1 => "rule1",
            Origin::Rule3 => "rule3",
        }
    }
}

/// Per-subgraph extraction record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub root: Var,
    pub origin: Origin,
}

/// The ordered set of extracted subgraphs; `provenance[i]` describes
/// `subgraphs[i]`. The first subgraph is always rooted at the input's
/// original root.
#[derive(Debug, Clone)]
pub struct SplitResult {
    pub subgraphs: Vec<AmrGraph>,
    pub provenance: Vec<Provenance>,
}

struct SubgraphBuilder {
    nodes: IndexMap<Var, String>,
    edges: Vec<Edge>,
}

impl SubgraphBuilder {
    fn new() -> Self {
        SubgraphBuilder { nodes: IndexMap::new(), edges: Vec::new() }
    }

    fn contains(&self, var: &Var) -> bool {
        self.nodes.contains_key(var.as_str())
    }

    fn build(self, root: Var) -> Result<AmrGraph, GraphError> {
        AmrGraph::new(root, self.nodes, self.edges)
    }
}

struct Splitter<'g> {
    work: &'g AmrGraph,
    sigma: usize,
    visited: HashSet<Var>,
    queued: HashSet<Var>,
    queue: VecDeque<(Var, Origin)>,
}

impl<'g> Splitter<'g> {
    fn enqueue(&mut self, var: &Var, origin: Origin) {
        if self.queued.insert(var.clone()) {
            self.queue.push_back((var.clone(), origin));
        }
    }

    fn copy(&mut self, var: &Var, is_entry: bool, builder: &mut SubgraphBuilder) -> Result<(), GraphError> {
        if builder.contains(var) {
            // reentrancy within this subgraph; the referencing edge is enough
            return Ok(());
        }
        let concept = self.work.concept(var)?.to_owned();
        builder.nodes.insert(var.clone(), concept);

        // Rule 1: cut out large core concepts, except the entry itself
        if !is_entry
            && is_core_concept(self.work, var)?
            && argument_count(self.work, var)? > self.sigma
        {
            self.enqueue(var, Origin::Rule1);
            return Ok(());
        }

        let revisit = self.visited.contains(var.as_str());
        if !revisit {
            self.visited.insert(var.clone());
        }
        let edges: Vec<Edge> = self.work.outgoing(var).cloned().collect();
        for edge in edges {
            // Rule 2: on a revisit only non-core relations survive
            if revisit && classify_role(&edge.role).is_core {
                continue;
            }
            builder.edges.push(edge.clone());
            if let Target::Var(child) = &edge.target {
                self.copy(child, false, builder)?;
            }
        }
        Ok(())
    }
}

/// Extract subgraphs from `graph`. With `apply_rule3` the graph is
/// de-inverted first and the reversal's predicate endpoints seed the root
/// queue after the original root; Rule 1 discoveries are appended as the walk
/// finds them. Roots are processed first-in-first-out and never enqueued
/// twice.
pub fn split(graph: &AmrGraph, config: SplitConfig) -> Result<SplitResult, GraphError> {
    let (work, candidates) = if config.apply_rule3 {
        deinvert(graph)?
    } else {
        (graph.clone(), Vec::new())
    };

    let mut splitter = Splitter {
        work: &work,
        sigma: config.sigma,
        visited: HashSet::new(),
        queued: HashSet::new(),
        queue: VecDeque::new(),
    };
    splitter.enqueue(work.root(), Origin::OriginalRoot);
    for candidate in &candidates {
        splitter.enqueue(candidate, Origin::Rule3);
    }

    let mut subgraphs = Vec::new();
    let mut provenance = Vec::new();
    while let Some((entry, origin)) = splitter.queue.pop_front() {
        let mut builder = SubgraphBuilder::new();
        splitter.copy(&entry, true, &mut builder)?;
        subgraphs.push(builder.build(entry.clone())?);
        provenance.push(Provenance { root: entry, origin });
    }
    Ok(SplitResult { subgraphs, provenance })
}

/// Fraction of the input's node variables that appear in at least one of the
/// given subgraphs. A reference split always covers every node; arbitrary
/// candidate sets (e.g. from an emulated execution) may not.
pub fn node_coverage(input: &AmrGraph, subgraphs: &[AmrGraph]) -> f64 {
    let total = input.node_count();
    if total == 0 {
        return 0.0;
    }
    let mut covered: HashSet<&Var> = HashSet::new();
    for subgraph in subgraphs {
        for (var, _) in subgraph.nodes() {
            if input.contains(var) {
                covered.insert(var);
            }
        }
    }
    covered.len() as f64 / total as f64
}
