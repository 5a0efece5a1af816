//! Predicate lists, entity lists, and named-entity anonymization.
//!
//! Predicates are the core-concept nodes of a graph with their sense suffix
//! stripped; entities are the remaining concepts rendered the way a reader
//! would cite them (`city (Chaldon)`, `date (1935)`). Anonymization swaps
//! the string parts of every `:name` subtree for `CATEGORY_N` placeholders so
//! that a generator downstream cannot mangle rare names, and a map records
//! how to put the originals back.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::graph::{is_frame_concept, AmrGraph, Constant, Edge, Target, Var};

/// The predicate and entity lists for one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementList {
    pub predicates: Vec<String>,
    pub entities: Vec<String>,
}

/// One placeholder in an [`AnonymizationMap`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnonymizationEntry {
    pub placeholder: String,
    pub original: String,
    pub category: String,
}

/// Ordered placeholder ↔ original pairs produced by [`anonymize`]. Entries
/// are ordered by the depth-first position of the named node; placeholders
/// use the alphabet `[A-Z_0-9]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnonymizationMap {
    pub entries: Vec<AnonymizationEntry>,
}

impl AnonymizationMap {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, placeholder: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.placeholder == placeholder)
            .map(|e| e.original.as_str())
    }
}

/// Nodes in depth-first pre-order from the root, following stored edge order
/// and visiting each node once. This is the order the serializer emits nodes
/// in, and the order every list in this module uses.
fn dfs_order(graph: &AmrGraph) -> Vec<Var> {
    let mut order = Vec::with_capacity(graph.node_count());
    let mut seen: HashSet<&Var> = HashSet::new();
    let mut stack: Vec<&Var> = vec![graph.root()];
    while let Some(var) = stack.pop() {
        if !seen.insert(var) {
            continue;
        }
        order.push(var.clone());
        let children: Vec<&Var> = graph
            .outgoing(var)
            .filter_map(|e| e.target.as_var())
            .collect();
        for child in children.into_iter().rev() {
            if !seen.contains(child) {
                stack.push(child);
            }
        }
    }
    order
}

/// Lemmas of all core-concept nodes in depth-first order, sense suffix
/// removed. Two distinct nodes with the same frame yield two entries.
pub fn extract_predicates(graph: &AmrGraph) -> Vec<String> {
    dfs_order(graph)
        .iter()
        .filter_map(|var| {
            let concept = graph.concept(var).expect("declared variable");
            if is_frame_concept(concept) {
                let cut = concept.rfind('-').expect("frame concepts contain a dash");
                Some(concept[..cut].to_owned())
            } else {
                None
            }
        })
        .collect()
}

/// The `:op` edges of a node sorted by op index (`:op1`, `:op2`, ...,
/// `:op10`); edges with other roles are skipped.
fn op_edges(graph: &AmrGraph, var: &Var) -> Vec<(u32, Edge)> {
    let mut ops: Vec<(u32, Edge)> = graph
        .outgoing(var)
        .filter_map(|e| {
            e.role
                .strip_prefix(":op")
                .and_then(|digits| digits.parse::<u32>().ok())
                .map(|idx| (idx, e.clone()))
        })
        .collect();
    ops.sort_by_key(|(idx, _)| *idx);
    ops
}

/// The name node attached to `var` via a `:name` edge, if any.
fn name_child(graph: &AmrGraph, var: &Var) -> Option<Var> {
    graph.outgoing(var).find_map(|e| {
        if e.role != ":name" {
            return None;
        }
        let child = e.target.as_var()?;
        (graph.concept(child).ok()? == "name").then(|| child.clone())
    })
}

/// Join a name node's op constants with single spaces, in op-index order.
fn name_parts(graph: &AmrGraph, name_node: &Var) -> String {
    let parts: Vec<String> = op_edges(graph, name_node)
        .into_iter()
        .filter_map(|(_, e)| match e.target {
            Target::Constant(c) => Some(c.text),
            Target::Var(_) => None,
        })
        .collect();
    parts.join(" ")
}

fn first_constant(graph: &AmrGraph, var: &Var, role: &str) -> Option<String> {
    graph.outgoing(var).find_map(|e| match (&e.role, &e.target) {
        (r, Target::Constant(c)) if r == role => Some(c.text.clone()),
        _ => None,
    })
}

fn pad2(text: &str) -> String {
    if text.len() == 1 && text.chars().all(|c| c.is_ascii_digit()) {
        format!("0{text}")
    } else {
        text.to_owned()
    }
}

/// Render a date-entity from whichever of :year/:month/:day are present,
/// joined `YYYY-MM-DD` style.
fn date_content(graph: &AmrGraph, var: &Var) -> String {
    let mut parts = Vec::new();
    if let Some(year) = first_constant(graph, var, ":year") {
        parts.push(year);
    }
    if let Some(month) = first_constant(graph, var, ":month") {
        parts.push(pad2(&month));
    }
    if let Some(day) = first_constant(graph, var, ":day") {
        parts.push(pad2(&day));
    }
    parts.join("-")
}

/// Entity descriptions for every non-core node, in depth-first order. Name
/// nodes are consumed into their parent's description; a node with a `:name`
/// child renders as `concept (Name Parts)`; date-entities render from their
/// date components; anything else renders as its bare concept.
pub fn extract_entities(graph: &AmrGraph) -> Vec<String> {
    let mut entities = Vec::new();
    for var in dfs_order(graph) {
        let concept = graph.concept(&var).expect("declared variable");
        if is_frame_concept(concept) || concept == "name" {
            continue;
        }
        let display = if concept == "date-entity" { "date" } else { concept };
        let content = match name_child(graph, &var) {
            Some(name_node) => name_parts(graph, &name_node),
            None if concept == "date-entity" => date_content(graph, &var),
            None => String::new(),
        };
        if content.is_empty() {
            entities.push(display.to_owned());
        } else {
            entities.push(format!("{display} ({content})"));
        }
    }
    entities
}

/// Both lists together.
pub fn extract_elements(graph: &AmrGraph) -> ElementList {
    ElementList {
        predicates: extract_predicates(graph),
        entities: extract_entities(graph),
    }
}

fn category_of(concept: &str) -> String {
    concept
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_uppercase()
            } else {
                '_'
            }
        })
        .collect()
}

/// Replace the string parts of every `:name` subtree with `CATEGORY_N`
/// placeholder literals and drop `:wiki` attributes from the renamed nodes.
/// Placeholder indexes count per category in depth-first order. Name nodes
/// whose ops are not all string literals are left untouched, as are numeric
/// date and quantity attributes.
pub fn anonymize(graph: &AmrGraph) -> (AmrGraph, AnonymizationMap) {
    let mut map = AnonymizationMap::default();
    let mut per_category: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    // name node -> placeholder; parent nodes that lose their :wiki
    let mut planned: std::collections::HashMap<Var, String> = std::collections::HashMap::new();
    let mut strip_wiki: HashSet<Var> = HashSet::new();

    for var in dfs_order(graph) {
        let Some(name_node) = name_child(graph, &var) else {
            continue;
        };
        if planned.contains_key(&name_node) {
            continue;
        }
        let ops = op_edges(graph, &name_node);
        if ops.is_empty()
            || !ops
                .iter()
                .all(|(_, e)| matches!(&e.target, Target::Constant(c) if c.quoted))
        {
            continue;
        }
        let original = name_parts(graph, &name_node);
        let concept = graph.concept(&var).expect("declared variable");
        let category = category_of(concept);
        let index = per_category.entry(category.clone()).or_insert(0);
        let placeholder = format!("{category}_{index}");
        *index += 1;
        map.entries.push(AnonymizationEntry {
            placeholder: placeholder.clone(),
            original,
            category,
        });
        planned.insert(name_node, placeholder);
        strip_wiki.insert(var.clone());
    }

    if map.is_empty() {
        return (graph.clone(), map);
    }

    let mut edges: Vec<Edge> = Vec::with_capacity(graph.edge_count());
    let mut replaced: HashSet<&Var> = HashSet::new();
    for edge in graph.edges() {
        if strip_wiki.contains(&edge.source) && edge.role == ":wiki" {
            continue;
        }
        if let Some(placeholder) = planned.get(&edge.source) {
            if edge.role.strip_prefix(":op").is_some_and(|d| d.parse::<u32>().is_ok()) {
                // the first op becomes the placeholder; the rest vanish
                if replaced.insert(&edge.source) {
                    edges.push(Edge::new(
                        edge.source.clone(),
                        ":op1",
                        Target::Constant(Constant::string(placeholder.clone())),
                    ));
                }
                continue;
            }
        }
        edges.push(edge.clone());
    }
    let nodes = graph.nodes().map(|(v, c)| (v.clone(), c.to_owned())).collect();
    let anonymized = AmrGraph::new(graph.root().clone(), nodes, edges)
        .expect("anonymization preserves graph integrity");
    (anonymized, map)
}

/// Substitute placeholders back into realized text. Entries are applied in
/// reverse map order so that `PERSON_10` is restored before its prefix
/// `PERSON_1`.
pub fn deanonymize(text: &str, map: &AnonymizationMap) -> String {
    let mut out = text.to_owned();
    for entry in map.entries.iter().rev() {
        out = out.replace(&entry.placeholder, &entry.original);
    }
    out
}
