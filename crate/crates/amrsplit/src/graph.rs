//! In-memory AMR graph value and the structural queries the splitter depends
//! on: role classification, the core-concept test, argument counting in the
//! de-inverted orientation, and de-inversion itself.
//!
//! An AMR graph is a rooted directed graph. Nodes are concepts keyed by a
//! variable, edges carry role labels, and constants (numbers, quoted strings,
//! `-`, `+`, ...) hang off nodes as attributes rather than being nodes
//! themselves.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

/// A node variable such as `m` or `z1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_owned())
    }
}

impl AsRef<str> for Var {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Var {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A constant attribute value: a bare symbol (`1935`, `-`, `imperative`) or a
/// quoted string literal (`"Chaldon"`). Quoting is preserved so serialization
/// reproduces the source form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constant {
    pub text: String,
    pub quoted: bool,
}

impl Constant {
    pub fn symbol(text: impl Into<String>) -> Self {
        Constant { text: text.into(), quoted: false }
    }

    pub fn string(text: impl Into<String>) -> Self {
        Constant { text: text.into(), quoted: true }
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.quoted {
            write!(f, "\"{}\"", self.text)
        } else {
            f.write_str(&self.text)
        }
    }
}

/// The target of an edge: another node, or a constant attribute.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Var(Var),
    Constant(Constant),
}

impl Target {
    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Target::Var(v) => Some(v),
            Target::Constant(_) => None,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Var(v) => v.fmt(f),
            Target::Constant(c) => c.fmt(f),
        }
    }
}

/// A role-labeled edge. `role` includes the leading `:`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: Var,
    pub role: String,
    pub target: Target,
}

impl Edge {
    pub fn new(source: Var, role: impl Into<String>, target: Target) -> Self {
        Edge { source, role: role.into(), target }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("variable `{0}` is not declared in the graph")]
    UnknownVariable(String),
    #[error("duplicate declaration of variable `{0}`")]
    DuplicateVariable(String),
    #[error("root variable `{0}` is not declared in the graph")]
    UndeclaredRoot(String),
    #[error("edge endpoint `{0}` is not a declared variable")]
    UndeclaredEndpoint(String),
    #[error("invalid name `{0}`: names are nonempty and contain no whitespace or structural characters")]
    InvalidName(String),
    #[error("invalid role `{0}`: roles match :[A-Za-z0-9-]+")]
    InvalidRole(String),
    #[error("invalid constant `{0}`")]
    InvalidConstant(String),
    #[error("node(s) unreachable from the root: {0}")]
    Unreachable(String),
    #[error("de-inversion left node(s) unreachable from every root: {0}")]
    UnreachableAfterDeinversion(String),
}

fn valid_symbol(text: &str) -> bool {
    !text.is_empty()
        && !text.chars().any(|c| {
            c.is_whitespace() || matches!(c, '(' | ')' | '/' | '"' | ':' | '#' | '~')
        })
}

fn valid_role(role: &str) -> bool {
    match role.strip_prefix(':') {
        Some(rest) => {
            !rest.is_empty() && rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
        }
        None => false,
    }
}

/// Rooted AMR graph. Node iteration order is declaration order; edge order is
/// the order the edges were written, which the serializer follows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmrGraph {
    root: Var,
    nodes: IndexMap<Var, String>,
    edges: Vec<Edge>,
}

impl AmrGraph {
    /// Build a graph, checking referential integrity: the root and every edge
    /// endpoint must be declared, and all names must be serializable.
    /// Reachability from the root is not required here; `unreachable_from`
    /// and the serializer check it where it matters.
    pub fn new(
        root: Var,
        nodes: IndexMap<Var, String>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        for (var, concept) in &nodes {
            if !valid_symbol(var.as_str()) {
                return Err(GraphError::InvalidName(var.to_string()));
            }
            if !valid_symbol(concept) {
                return Err(GraphError::InvalidName(concept.clone()));
            }
        }
        if !nodes.contains_key(root.as_str()) {
            return Err(GraphError::UndeclaredRoot(root.to_string()));
        }
        for edge in &edges {
            if !valid_role(&edge.role) {
                return Err(GraphError::InvalidRole(edge.role.clone()));
            }
            if !nodes.contains_key(edge.source.as_str()) {
                return Err(GraphError::UndeclaredEndpoint(edge.source.to_string()));
            }
            match &edge.target {
                Target::Var(v) => {
                    if !nodes.contains_key(v.as_str()) {
                        return Err(GraphError::UndeclaredEndpoint(v.to_string()));
                    }
                }
                Target::Constant(c) => {
                    let ok = if c.quoted {
                        !c.text.contains('"') && !c.text.contains('\n')
                    } else {
                        valid_symbol(&c.text)
                    };
                    if !ok {
                        return Err(GraphError::InvalidConstant(c.text.clone()));
                    }
                }
            }
        }
        Ok(AmrGraph { root, nodes, edges })
    }

    /// Single-node graph.
    pub fn singleton(var: Var, concept: impl Into<String>) -> Result<Self, GraphError> {
        let mut nodes = IndexMap::new();
        nodes.insert(var.clone(), concept.into());
        AmrGraph::new(var, nodes, Vec::new())
    }

    pub fn root(&self) -> &Var {
        &self.root
    }

    pub fn concept(&self, var: &Var) -> Result<&str, GraphError> {
        self.nodes
            .get(var.as_str())
            .map(String::as_str)
            .ok_or_else(|| GraphError::UnknownVariable(var.to_string()))
    }

    pub fn contains(&self, var: &Var) -> bool {
        self.nodes.contains_key(var.as_str())
    }

    /// Nodes in declaration order.
    pub fn nodes(&self) -> impl Iterator<Item = (&Var, &str)> {
        self.nodes.iter().map(|(v, c)| (v, c.as_str()))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Outgoing edges of `var` in stored order.
    pub fn outgoing<'g>(&'g self, var: &'g Var) -> impl Iterator<Item = &'g Edge> + 'g {
        self.edges.iter().filter(move |e| &e.source == var)
    }

    /// Variables not reachable from `starts` when edges are traversed in
    /// their written direction.
    pub fn unreachable_from<'a>(&self, starts: impl IntoIterator<Item = &'a Var>) -> Vec<Var> {
        let mut seen: HashSet<&str> = HashSet::new();
        let mut stack: Vec<&Var> = Vec::new();
        for s in starts {
            if self.contains(s) && seen.insert(s.as_str()) {
                stack.push(s);
            }
        }
        while let Some(v) = stack.pop() {
            for edge in self.outgoing(v) {
                if let Target::Var(t) = &edge.target {
                    if seen.insert(t.as_str()) {
                        stack.push(t);
                    }
                }
            }
        }
        self.nodes
            .keys()
            .filter(|v| !seen.contains(v.as_str()))
            .cloned()
            .collect()
    }
}

/// `-of` roles that are ordinary roles from the AMR role inventory, not
/// inversions.
const NON_INVERSE_OF_ROLES: [&str; 3] = [":consist-of", ":prep-out-of", ":prep-on-behalf-of"];

/// Classification of a role label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleClass {
    pub role: String,
    pub is_inverse: bool,
    pub is_core: bool,
}

/// Classify a role. Total: any string is accepted.
pub fn classify_role(role: &str) -> RoleClass {
    let is_inverse = match role.strip_suffix("-of") {
        // an empty or bare-`:` base would not be a role at all
        Some(base) => base.len() > 1 && !NON_INVERSE_OF_ROLES.contains(&role),
        None => false,
    };
    let is_core = {
        let body = role.strip_prefix(":ARG").unwrap_or("");
        let digits = body.strip_suffix("-of").unwrap_or(body);
        !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
    };
    RoleClass { role: role.to_owned(), is_inverse, is_core }
}

/// The result of reversing a role: `:ARG1-of` becomes `:ARG1`.
pub fn deinverted_role(role: &str) -> String {
    match role.strip_suffix("-of") {
        Some(base) if classify_role(role).is_inverse => base.to_owned(),
        _ => role.to_owned(),
    }
}

/// True for OntoNotes-style frame concepts: a base lemma plus a 2-or-3-digit
/// sense suffix, e.g. `move-01` or `have-org-role-91`. Hyphenated concepts
/// without a digit sense (`date-entity`) do not qualify.
pub fn is_frame_concept(concept: &str) -> bool {
    match concept.rfind('-') {
        Some(pos) if pos > 0 => {
            let suffix = &concept[pos + 1..];
            (2..=3).contains(&suffix.len()) && suffix.chars().all(|c| c.is_ascii_digit())
        }
        _ => false,
    }
}

/// Whether the node's concept is a core concept (a predicate frame).
pub fn is_core_concept(graph: &AmrGraph, var: &Var) -> Result<bool, GraphError> {
    Ok(is_frame_concept(graph.concept(var)?))
}

/// Structural classification of one node, as seen by the splitter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeKind {
    pub variable: Var,
    pub is_core_concept: bool,
    pub is_leaf: bool,
}

impl NodeKind {
    /// Classify `var` in `graph`. `is_leaf` refers to the graph as given; the
    /// splitter calls this on the de-inverted graph.
    pub fn of(graph: &AmrGraph, var: &Var) -> Result<NodeKind, GraphError> {
        let is_core = is_core_concept(graph, var)?;
        let is_leaf = graph.outgoing(var).next().is_none();
        Ok(NodeKind { variable: var.clone(), is_core_concept: is_core, is_leaf })
    }
}

/// Number of outgoing edges of `var` in the de-inverted orientation. All
/// roles count, including constant attributes.
pub fn argument_count(graph: &AmrGraph, var: &Var) -> Result<usize, GraphError> {
    if !graph.contains(var) {
        return Err(GraphError::UnknownVariable(var.to_string()));
    }
    let mut count = 0;
    for edge in graph.edges() {
        // an inverse edge to a constant cannot be reversed and stays with
        // its written source
        let reversible = classify_role(&edge.role).is_inverse && edge.target.as_var().is_some();
        if reversible {
            if edge.target.as_var() == Some(var) {
                count += 1;
            }
        } else if &edge.source == var {
            count += 1;
        }
    }
    Ok(count)
}

/// Reverse every inverse edge `(s, r-of, t)` into `(t, r, s)`, keeping edge
/// positions. Returns the new graph and, in edge order, the predicate-side
/// endpoint of each reversed edge: the node that is the source after
/// reversal. These are the splitter's Rule 3 root candidates.
///
/// Fails if the reversal leaves a node unreachable from both the original
/// root and every candidate.
pub fn deinvert(graph: &AmrGraph) -> Result<(AmrGraph, Vec<Var>), GraphError> {
    let mut edges = Vec::with_capacity(graph.edge_count());
    let mut candidates = Vec::new();
    for edge in graph.edges() {
        match (&edge.target, classify_role(&edge.role).is_inverse) {
            (Target::Var(t), true) => {
                candidates.push(t.clone());
                edges.push(Edge::new(
                    t.clone(),
                    deinverted_role(&edge.role),
                    Target::Var(edge.source.clone()),
                ));
            }
            _ => edges.push(edge.clone()),
        }
    }
    if candidates.is_empty() {
        // nothing was reversed, so reachability cannot have changed
        return Ok((graph.clone(), candidates));
    }
    let nodes = graph.nodes.clone();
    let result = AmrGraph::new(graph.root.clone(), nodes, edges)?;
    let unreachable =
        result.unreachable_from(std::iter::once(&graph.root).chain(candidates.iter()));
    if !unreachable.is_empty() {
        let list: Vec<String> = unreachable.iter().map(|v| v.to_string()).collect();
        return Err(GraphError::UnreachableAfterDeinversion(list.join(", ")));
    }
    Ok((result, candidates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penman::parse;

    fn g(source: &str) -> AmrGraph {
        parse(source).expect("fixture parses")
    }

    #[test]
    fn role_classification() {
        let rc = classify_role(":ARG1-of");
        assert!(rc.is_inverse);
        assert!(rc.is_core);

        let rc = classify_role(":name");
        assert!(!rc.is_inverse);
        assert!(!rc.is_core);

        // ordinary roles from the role inventory despite the suffix
        assert!(!classify_role(":consist-of").is_inverse);
        assert!(!classify_role(":prep-out-of").is_inverse);
        assert!(!classify_role(":prep-on-behalf-of").is_inverse);

        assert!(classify_role(":ARG0").is_core);
        assert!(!classify_role(":ARG0").is_inverse);
        assert!(classify_role(":location-of").is_inverse);
        assert!(!classify_role(":location-of").is_core);
        assert!(!classify_role(":ARGX").is_core);
        assert!(!classify_role(":arg0").is_core);
    }

    #[test]
    fn core_implies_arg_prefix() {
        for role in [":ARG0", ":ARG12-of", ":op1", ":mod", ":ARG1-of", ":name", ":year"] {
            let rc = classify_role(role);
            if rc.is_core {
                assert!(role.starts_with(":ARG"));
            }
        }
    }

    #[test]
    fn frame_concepts() {
        assert!(is_frame_concept("move-01"));
        assert!(is_frame_concept("know-02"));
        assert!(is_frame_concept("have-org-role-91"));
        assert!(!is_frame_concept("cottage"));
        assert!(!is_frame_concept("distance-quantity"));
        assert!(!is_frame_concept("x-1"));
        assert!(!is_frame_concept("x-0123"));
        assert!(!is_frame_concept("-01"));
    }

    #[test]
    fn argument_count_in_deinverted_view() {
        let graph =
            g("(m / move-01 :ARG0 (t / they) :ARG2 (l / location) :time (d / date-entity :year 1935))");
        assert_eq!(argument_count(&graph, &Var::from("m")).unwrap(), 3);
        assert_eq!(argument_count(&graph, &Var::from("t")).unwrap(), 0);
        // the date constant counts for d
        assert_eq!(argument_count(&graph, &Var::from("d")).unwrap(), 1);

        let graph = g("(c / cottage :ARG1-of (k / know-02))");
        // after de-inversion the edge leaves k
        assert_eq!(argument_count(&graph, &Var::from("c")).unwrap(), 0);
        assert_eq!(argument_count(&graph, &Var::from("k")).unwrap(), 1);

        assert!(argument_count(&graph, &Var::from("zz")).is_err());
    }

    #[test]
    fn deinvert_reverses_inverse_edges() {
        let graph = g("(c / cottage :ARG1-of (k / know-02))");
        let (out, candidates) = deinvert(&graph).unwrap();
        assert_eq!(candidates, vec![Var::from("k")]);
        assert_eq!(out.edge_count(), 1);
        let e = &out.edges()[0];
        assert_eq!(e.source, Var::from("k"));
        assert_eq!(e.role, ":ARG1");
        assert_eq!(e.target, Target::Var(Var::from("c")));
        // root is unchanged
        assert_eq!(out.root(), &Var::from("c"));
    }

    #[test]
    fn deinvert_no_inverse_edges_is_identity() {
        let graph = g("(m / move-01 :ARG0 (t / they))");
        let (out, candidates) = deinvert(&graph).unwrap();
        assert_eq!(out, graph);
        assert!(candidates.is_empty());
    }

    #[test]
    fn deinvert_lists_repeated_predicates() {
        let graph = g("(x / thing :ARG1-of (k / know-02) :ARG2-of k)");
        let (_, candidates) = deinvert(&graph).unwrap();
        assert_eq!(candidates, vec![Var::from("k"), Var::from("k")]);
    }

    #[test]
    fn deinvert_is_idempotent() {
        for src in [
            "(c / cottage :ARG1-of (k / know-02))",
            "(m / move-01 :ARG0 (t / they) :ARG1 (s / see-01 :ARG0 t))",
            "(x / thing :ARG1-of (k / know-02 :ARG0 (p / person)))",
        ] {
            let graph = g(src);
            let (once, _) = deinvert(&graph).unwrap();
            let (twice, candidates) = deinvert(&once).unwrap();
            assert_eq!(once, twice);
            assert!(candidates.is_empty());
        }
    }

    #[test]
    fn deinvert_preserves_node_set_and_edge_count() {
        let graph = g("(c / cottage :ARG1-of (k / know-02 :ARG2 (m / miss-green)) :mod (o / old))");
        let (out, _) = deinvert(&graph).unwrap();
        assert_eq!(out.node_count(), graph.node_count());
        assert_eq!(out.edge_count(), graph.edge_count());
        let before: Vec<&Var> = graph.nodes().map(|(v, _)| v).collect();
        let after: Vec<&Var> = out.nodes().map(|(v, _)| v).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn argument_counts_sum_to_edge_count_after_deinversion() {
        let graph = g("(c / cottage :ARG1-of (k / know-02 :ARG2 (m / miss-green)) :mod (o / old))");
        let total: usize = graph
            .nodes()
            .map(|(v, _)| argument_count(&graph, v).unwrap())
            .sum();
        assert_eq!(total, graph.edge_count());
    }

    #[test]
    fn graph_integrity_checks() {
        let mut nodes = IndexMap::new();
        nodes.insert(Var::from("a"), "apple".to_owned());
        assert!(matches!(
            AmrGraph::new(Var::from("b"), nodes.clone(), vec![]),
            Err(GraphError::UndeclaredRoot(_))
        ));
        let bad_edge = vec![Edge::new(
            Var::from("a"),
            ":mod",
            Target::Var(Var::from("zz")),
        )];
        assert!(matches!(
            AmrGraph::new(Var::from("a"), nodes.clone(), bad_edge),
            Err(GraphError::UndeclaredEndpoint(_))
        ));
        let bad_role = vec![Edge::new(
            Var::from("a"),
            "mod",
            Target::Constant(Constant::symbol("1")),
        )];
        assert!(matches!(
            AmrGraph::new(Var::from("a"), nodes, bad_role),
            Err(GraphError::InvalidRole(_))
        ));
    }

    #[test]
    fn node_kind_of_leaf_and_core() {
        let graph = g("(m / move-01 :ARG0 (t / they))");
        let m = NodeKind::of(&graph, &Var::from("m")).unwrap();
        assert!(m.is_core_concept);
        assert!(!m.is_leaf);
        let t = NodeKind::of(&graph, &Var::from("t")).unwrap();
        assert!(!t.is_core_concept);
        assert!(t.is_leaf);
    }
}
