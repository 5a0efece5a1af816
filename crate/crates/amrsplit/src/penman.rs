//! PENMAN notation, the wire format for all graph I/O.
//!
//! The accepted grammar is
//!
//! ```text
//! node   := "(" var "/" concept (role target)* ")"
//! target := node | var | constant
//! ```
//!
//! where roles match `:[A-Za-z0-9-]+` and input is UTF-8. Comments (lines or
//! trailing segments beginning `#`) and `~` alignment markers, as found in
//! treebank dumps, are stripped while tokenizing. A bare symbol in a target
//! position that names an already-declared variable is a reentrancy; any
//! other bare symbol, number, `-`, `+`, or string literal becomes a constant
//! attribute.

use std::fmt;

use indexmap::IndexMap;

use crate::graph::{AmrGraph, Constant, Edge, GraphError, Target, Var};

/// Nesting deeper than this is rejected, preventing stack exhaustion on
/// adversarial input.
const MAX_NESTING_DEPTH: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    OpenParen,
    CloseParen,
    Slash,
    Role,
    Symbol,
    StringLiteral,
}

/// One lexical token. `position` is the byte offset of the token start in the
/// original source; `text` is the source slice (string literals keep their
/// surrounding quotes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenmanToken {
    pub kind: TokenKind,
    pub text: String,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// A problem found while tokenizing or parsing. Every `Error` diagnostic
/// prevents a graph from being returned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub position: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    fn error(position: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic { position, message: message.into(), severity: Severity::Error }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{} at byte {}: {}", severity, self.position, self.message)
    }
}

fn is_symbol_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '/' | '"' | ':' | '#' | '~')
}

/// Tokenize PENMAN source. Never aborts: failures are reported as
/// diagnostics alongside whatever tokens were recognized.
pub fn tokenize(source: &str) -> (Vec<PenmanToken>, Vec<ParseDiagnostic>) {
    let mut tokens = Vec::new();
    let mut diagnostics = Vec::new();
    let bytes = source.as_bytes();
    let mut chars = source.char_indices().peekable();

    while let Some((pos, c)) = chars.next() {
        match c {
            _ if c.is_whitespace() => {}
            '#' => {
                // comment to end of line
                for (_, c2) in chars.by_ref() {
                    if c2 == '\n' {
                        break;
                    }
                }
            }
            '~' => {
                // alignment marker such as `~e.5`; swallow it
                while let Some(&(_, c2)) = chars.peek() {
                    if is_symbol_char(c2) || c2 == '.' {
                        chars.next();
                    } else {
                        break;
                    }
                }
            }
            '(' => tokens.push(PenmanToken {
                kind: TokenKind::OpenParen,
                text: "(".to_owned(),
                position: pos,
            }),
            ')' => tokens.push(PenmanToken {
                kind: TokenKind::CloseParen,
                text: ")".to_owned(),
                position: pos,
            }),
            '/' => tokens.push(PenmanToken {
                kind: TokenKind::Slash,
                text: "/".to_owned(),
                position: pos,
            }),
            '"' => {
                let mut end = None;
                while let Some((p2, c2)) = chars.next() {
                    match c2 {
                        '"' => {
                            end = Some(p2);
                            break;
                        }
                        '\n' => break,
                        _ => {}
                    }
                }
                match end {
                    Some(p2) => tokens.push(PenmanToken {
                        kind: TokenKind::StringLiteral,
                        text: source[pos..p2 + 1].to_owned(),
                        position: pos,
                    }),
                    None => diagnostics
                        .push(ParseDiagnostic::error(pos, "unterminated string literal")),
                }
            }
            ':' => {
                let mut end = pos + 1;
                while let Some(&(p2, c2)) = chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '-' {
                        chars.next();
                        end = p2 + c2.len_utf8();
                    } else {
                        break;
                    }
                }
                if end == pos + 1 {
                    diagnostics.push(ParseDiagnostic::error(pos, "empty role name after `:`"));
                } else {
                    tokens.push(PenmanToken {
                        kind: TokenKind::Role,
                        text: source[pos..end].to_owned(),
                        position: pos,
                    });
                }
            }
            _ => {
                let mut end = pos + c.len_utf8();
                while let Some(&(p2, c2)) = chars.peek() {
                    if is_symbol_char(c2) {
                        chars.next();
                        end = p2 + c2.len_utf8();
                    } else {
                        break;
                    }
                }
                debug_assert!(end <= bytes.len());
                tokens.push(PenmanToken {
                    kind: TokenKind::Symbol,
                    text: source[pos..end].to_owned(),
                    position: pos,
                });
            }
        }
    }
    (tokens, diagnostics)
}

struct Parser<'t> {
    tokens: &'t [PenmanToken],
    pos: usize,
    nodes: IndexMap<Var, String>,
    edges: Vec<Edge>,
    diagnostics: Vec<ParseDiagnostic>,
    source_len: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t PenmanToken> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'t PenmanToken> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|t| t.position).unwrap_or(self.source_len)
    }

    fn fail<T>(&mut self, position: usize, message: impl Into<String>) -> Option<T> {
        self.diagnostics.push(ParseDiagnostic::error(position, message));
        None
    }

    /// Consume `( var / concept`, register the node, and return the variable
    /// with the `(` position. Shared by the root and every nested node.
    fn open_node(&mut self) -> Option<(Var, usize)> {
        let open_pos = match self.next() {
            Some(t) if t.kind == TokenKind::OpenParen => t.position,
            Some(t) => {
                let (p, text) = (t.position, t.text.clone());
                return self.fail(p, format!("expected `(`, found `{text}`"));
            }
            None => {
                let p = self.here();
                return self.fail(p, "expected `(`, found end of input");
            }
        };
        let var = match self.next() {
            Some(t) if t.kind == TokenKind::Symbol => Var::new(&t.text),
            other => {
                let p = other.map(|t| t.position).unwrap_or(self.source_len);
                return self.fail(p, "expected a variable after `(`");
            }
        };
        match self.next() {
            Some(t) if t.kind == TokenKind::Slash => {}
            other => {
                let p = other.map(|t| t.position).unwrap_or(self.source_len);
                return self.fail(
                    p,
                    format!("missing `/` concept on first declaration of variable `{var}`"),
                );
            }
        }
        let concept = match self.next() {
            Some(t) if t.kind == TokenKind::Symbol => t.text.clone(),
            other => {
                let p = other.map(|t| t.position).unwrap_or(self.source_len);
                return self.fail(p, format!("expected a concept after `{var} /`"));
            }
        };
        if self.nodes.contains_key(var.as_str()) {
            return self.fail(
                open_pos,
                format!("duplicate concept declaration for variable `{var}`"),
            );
        }
        self.nodes.insert(var.clone(), concept);
        Some((var, open_pos))
    }

    /// Parse the whole `( var / concept (role target)* )` tree without native
    /// recursion: open nodes live on an explicit stack, so the nesting limit
    /// is the only depth bound.
    fn graph(&mut self) -> Option<Var> {
        let (root, root_open) = self.open_node()?;
        // (variable, position of its `(`)
        let mut stack: Vec<(Var, usize)> = vec![(root.clone(), root_open)];
        while let Some((var, open_pos)) = stack.last().cloned() {
            match self.peek() {
                Some(t) if t.kind == TokenKind::CloseParen => {
                    self.next();
                    stack.pop();
                }
                Some(t) if t.kind == TokenKind::Role => {
                    let role = t.text.clone();
                    let role_pos = t.position;
                    self.next();
                    let target = match self.peek() {
                        Some(t) if t.kind == TokenKind::OpenParen => {
                            if stack.len() >= MAX_NESTING_DEPTH {
                                let p = t.position;
                                return self.fail(
                                    p,
                                    format!("nesting deeper than {MAX_NESTING_DEPTH} levels"),
                                );
                            }
                            let (child, child_open) = self.open_node()?;
                            stack.push((child.clone(), child_open));
                            Target::Var(child)
                        }
                        Some(t) if t.kind == TokenKind::Symbol => {
                            let text = t.text.clone();
                            self.next();
                            if self.nodes.contains_key(text.as_str()) {
                                Target::Var(Var::new(text))
                            } else {
                                Target::Constant(Constant::symbol(text))
                            }
                        }
                        Some(t) if t.kind == TokenKind::StringLiteral => {
                            let inner = t.text[1..t.text.len() - 1].to_owned();
                            self.next();
                            Target::Constant(Constant::string(inner))
                        }
                        _ => {
                            let p = self.here();
                            return self
                                .fail(p, format!("role `{role}` at byte {role_pos} has no target"));
                        }
                    };
                    self.edges.push(Edge::new(var, role, target));
                }
                Some(t) => {
                    let (p, text) = (t.position, t.text.clone());
                    return self.fail(p, format!("expected a role or `)`, found `{text}`"));
                }
                None => {
                    let p = self.source_len;
                    return self.fail(
                        p,
                        format!("unbalanced parentheses: `(` at byte {open_pos} is never closed"),
                    );
                }
            }
        }
        Some(root)
    }
}

/// Parse one graph from PENMAN source.
pub fn parse(source: &str) -> Result<AmrGraph, Vec<ParseDiagnostic>> {
    let (tokens, mut diagnostics) = tokenize(source);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        return Err(diagnostics);
    }
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        nodes: IndexMap::new(),
        edges: Vec::new(),
        diagnostics: Vec::new(),
        source_len: source.len(),
    };
    let root = parser.graph();
    if let Some(t) = parser.peek() {
        if parser.diagnostics.is_empty() {
            parser.diagnostics.push(ParseDiagnostic::error(
                t.position,
                format!("unexpected content after the graph: `{}`", t.text),
            ));
        }
    }
    diagnostics.extend(parser.diagnostics);
    match root {
        Some(root) if diagnostics.iter().all(|d| d.severity != Severity::Error) => {
            match AmrGraph::new(root, parser.nodes, parser.edges) {
                Ok(graph) => Ok(graph),
                Err(e) => {
                    diagnostics.push(ParseDiagnostic::error(0, e.to_string()));
                    Err(diagnostics)
                }
            }
        }
        _ => Err(diagnostics),
    }
}

// work items for the explicit-stack emitters; `Open` renders a node (or a
// bare reference if already seen), the rest are literal output
enum Emit<'g> {
    Open(&'g Var, usize),
    Text(String),
    Close,
}

fn serialize_with<F>(graph: &AmrGraph, sep: F) -> Result<String, GraphError>
where
    F: Fn(usize) -> String,
{
    let unreachable = graph.unreachable_from(std::iter::once(graph.root()));
    if !unreachable.is_empty() {
        let list: Vec<String> = unreachable.iter().map(|v| v.to_string()).collect();
        return Err(GraphError::Unreachable(list.join(", ")));
    }
    let mut out = String::new();
    let mut visited: std::collections::HashSet<&Var> = std::collections::HashSet::new();
    let mut work: Vec<Emit> = vec![Emit::Open(graph.root(), 0)];
    while let Some(item) = work.pop() {
        match item {
            Emit::Text(s) => out.push_str(&s),
            Emit::Close => out.push(')'),
            Emit::Open(var, depth) => {
                if !visited.insert(var) {
                    out.push_str(var.as_str());
                    continue;
                }
                out.push('(');
                out.push_str(var.as_str());
                out.push_str(" / ");
                out.push_str(graph.concept(var).expect("declared variable"));
                work.push(Emit::Close);
                let edges: Vec<&Edge> = graph.outgoing(var).collect();
                for edge in edges.into_iter().rev() {
                    match &edge.target {
                        Target::Var(v) => work.push(Emit::Open(v, depth + 1)),
                        Target::Constant(c) => work.push(Emit::Text(c.to_string())),
                    }
                    work.push(Emit::Text(format!("{}{} ", sep(depth + 1), edge.role)));
                }
            }
        }
    }
    Ok(out)
}

/// Serialize on a single line. The tree expansion visits each node's edges in
/// stored order; a node already serialized in full is emitted as a bare
/// variable reference on subsequent encounters.
pub fn serialize(graph: &AmrGraph) -> Result<String, GraphError> {
    serialize_with(graph, |_| " ".to_owned())
}

/// Serialize with one role per line, indented four spaces per nesting level.
pub fn serialize_indent(graph: &AmrGraph) -> Result<String, GraphError> {
    serialize_with(graph, |depth| format!("\n{}", "    ".repeat(depth)))
}

/// Canonical text form: variables are renamed `z0`, `z1`, ... in depth-first
/// visit order with each node's edges sorted by (role text, target concept or
/// constant text). Graphs that are isomorphic up to variable renaming
/// canonicalize to byte-equal text.
pub fn canonical_form(graph: &AmrGraph) -> Result<String, GraphError> {
    let unreachable = graph.unreachable_from(std::iter::once(graph.root()));
    if !unreachable.is_empty() {
        let list: Vec<String> = unreachable.iter().map(|v| v.to_string()).collect();
        return Err(GraphError::Unreachable(list.join(", ")));
    }

    fn target_text(graph: &AmrGraph, target: &Target) -> String {
        match target {
            Target::Var(v) => graph.concept(v).expect("declared variable").to_owned(),
            Target::Constant(c) => c.to_string(),
        }
    }

    fn sorted_edges<'g>(graph: &'g AmrGraph, var: &'g Var) -> Vec<&'g Edge> {
        let mut edges: Vec<&Edge> = graph.outgoing(var).collect();
        edges.sort_by(|a, b| {
            let ka = (&a.role, target_text(graph, &a.target));
            let kb = (&b.role, target_text(graph, &b.target));
            ka.cmp(&kb)
        });
        edges
    }

    let mut out = String::new();
    let mut names: IndexMap<Var, String> = IndexMap::new();
    let mut work: Vec<Emit> = vec![Emit::Open(graph.root(), 0)];
    while let Some(item) = work.pop() {
        match item {
            Emit::Text(s) => out.push_str(&s),
            Emit::Close => out.push(')'),
            Emit::Open(var, _) => {
                // names are assigned the first time a node is reached in
                // emission order; later encounters print the bare name
                if let Some(name) = names.get(var.as_str()) {
                    out.push_str(name);
                    continue;
                }
                let name = format!("z{}", names.len());
                names.insert(var.clone(), name.clone());
                out.push('(');
                out.push_str(&name);
                out.push_str(" / ");
                out.push_str(graph.concept(var).expect("declared variable"));
                work.push(Emit::Close);
                for edge in sorted_edges(graph, var).into_iter().rev() {
                    match &edge.target {
                        Target::Var(v) => work.push(Emit::Open(v, 0)),
                        Target::Constant(c) => work.push(Emit::Text(c.to_string())),
                    }
                    work.push(Emit::Text(format!(" {} ", edge.role)));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenize_smallest_graph() {
        let (tokens, diags) = tokenize("(a / apple)");
        assert!(diags.is_empty());
        let kinds: Vec<TokenKind> = tokens.iter().map(|t| t.kind).collect();
        assert_eq!(
            kinds,
            vec![
                TokenKind::OpenParen,
                TokenKind::Symbol,
                TokenKind::Slash,
                TokenKind::Symbol,
                TokenKind::CloseParen
            ]
        );
        assert_eq!(tokens[1].text, "a");
        assert_eq!(tokens[3].text, "apple");
    }

    #[test]
    fn tokenize_role_with_inverse_suffix() {
        let (tokens, diags) = tokenize(":ARG1-of");
        assert!(diags.is_empty());
        assert_eq!(tokens.len(), 1);
        assert_eq!(tokens[0].kind, TokenKind::Role);
        assert_eq!(tokens[0].text, ":ARG1-of");
    }

    #[test]
    fn tokenize_unbalanced_input_succeeds() {
        let (tokens, diags) = tokenize("(z1 / flow-01 :ARG1");
        assert!(diags.is_empty());
        assert_eq!(tokens.len(), 5);
        // imbalance is a parse-stage error
        assert!(parse("(z1 / flow-01 :ARG1").is_err());
    }

    #[test]
    fn tokenize_positions_strictly_increase() {
        let (tokens, _) = tokenize("(m / move-01 :ARG0 (t / they) :time \"now\")");
        for pair in tokens.windows(2) {
            assert!(pair[0].position < pair[1].position);
        }
    }

    #[test]
    fn tokenize_reconstructs_source_content() {
        for source in ["(a / apple)", "(m / move-01 :ARG0 (t / they) :name \"A b\")"] {
            let (tokens, diags) = tokenize(source);
            assert!(diags.is_empty());
            let joined: String = tokens.iter().map(|t| t.text.as_str()).collect();
            let stripped: String = source.chars().filter(|c| !c.is_whitespace()).collect();
            // the one space inside the string literal survives in the token text
            let stripped_tokens: String = joined.chars().filter(|c| !c.is_whitespace()).collect();
            assert_eq!(stripped_tokens, stripped);
        }
    }

    #[test]
    fn tokenize_unterminated_string() {
        let (_, diags) = tokenize("(c / city :name \"Chaldon");
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].severity, Severity::Error);
        assert!(diags[0].message.contains("unterminated"));
    }

    #[test]
    fn tokenize_strips_comments_and_alignment() {
        let source = "# ::snt They moved.\n(m / move-01~e.2 :ARG0~e.1 (t / they)) # tail";
        let (tokens, diags) = tokenize(source);
        assert!(diags.is_empty());
        let texts: Vec<&str> = tokens.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["(", "m", "/", "move-01", ":ARG0", "(", "t", "/", "they", ")", ")"]);
    }

    #[test]
    fn parse_smallest_graph() {
        let g = parse("(a / apple)").unwrap();
        assert_eq!(g.root().as_str(), "a");
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.concept(g.root()).unwrap(), "apple");
    }

    #[test]
    fn parse_inverse_edge() {
        let g = parse("(c / cottage :ARG1-of (k / know-02))").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        let e = &g.edges()[0];
        assert_eq!(e.source.as_str(), "c");
        assert_eq!(e.role, ":ARG1-of");
        assert_eq!(e.target, Target::Var(Var::from("k")));
    }

    #[test]
    fn parse_reentrancy() {
        let g = parse("(m / move-01 :ARG0 (t / they) :ARG2 t)").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[1].target, Target::Var(Var::from("t")));
    }

    #[test]
    fn parse_constants() {
        let g = parse("(d / date-entity :year 1935 :polarity - :wiki \"Q42\" :mode imperative)")
            .unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.edges()[0].target, Target::Constant(Constant::symbol("1935")));
        assert_eq!(g.edges()[1].target, Target::Constant(Constant::symbol("-")));
        assert_eq!(g.edges()[2].target, Target::Constant(Constant::string("Q42")));
        assert_eq!(g.edges()[3].target, Target::Constant(Constant::symbol("imperative")));
    }

    #[test]
    fn parse_errors() {
        // unbalanced
        assert!(parse("(a / apple").is_err());
        // missing concept
        let err = parse("(a :mod b)").unwrap_err();
        assert!(err[0].message.contains("missing `/`"));
        // duplicate declaration
        let err = parse("(a / apple :mod (a / pear))").unwrap_err();
        assert!(err[0].message.contains("duplicate"));
        // role with no target
        let err = parse("(a / apple :mod)").unwrap_err();
        assert!(err[0].message.contains("no target"));
        // trailing content
        assert!(parse("(a / apple) (b / pear)").is_err());
        // empty input
        assert!(parse("").is_err());
    }

    #[test]
    fn parse_depth_limit() {
        let mut deep = String::new();
        for i in 0..1100 {
            deep.push_str(&format!("(n{i} / thing :mod "));
        }
        deep.push_str("(x / leaf)");
        deep.push_str(&")".repeat(1100));
        let err = parse(&deep).unwrap_err();
        assert!(err[0].message.contains("nesting"));
    }

    #[test]
    fn serialize_round_trips() {
        for source in [
            "(a / apple)",
            "(m / move-01 :ARG0 (t / they) :ARG2 t)",
            "(c / cottage :ARG1-of (k / know-02))",
            "(c / city :name (n / name :op1 \"Chaldon\") :wiki \"Q117089\")",
        ] {
            let g = parse(source).unwrap();
            assert_eq!(serialize(&g).unwrap(), source);
        }
    }

    #[test]
    fn serialize_preserves_counts() {
        let g = parse("(m / move-01 :ARG0 (t / they) :ARG2 t)").unwrap();
        let again = parse(&serialize(&g).unwrap()).unwrap();
        assert_eq!(again.node_count(), g.node_count());
        assert_eq!(again.edge_count(), g.edge_count());
    }

    #[test]
    fn serialize_indent_shape() {
        let g = parse("(m / move-01 :ARG0 (t / they) :time (d / date-entity :year 1935))").unwrap();
        let text = serialize_indent(&g).unwrap();
        assert_eq!(
            text,
            "(m / move-01\n    :ARG0 (t / they)\n    :time (d / date-entity\n        :year 1935))"
        );
        let again = parse(&text).unwrap();
        assert_eq!(canonical_form(&again).unwrap(), canonical_form(&g).unwrap());
    }

    #[test]
    fn canonical_renaming_invariance() {
        let a = parse("(b / boy)").unwrap();
        let b = parse("(x / boy)").unwrap();
        assert_eq!(canonical_form(&a).unwrap(), "(z0 / boy)");
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn canonical_sorts_roles() {
        let a = parse("(m / move-01 :ARG2 (c / city) :ARG0 (t / they))").unwrap();
        let b = parse("(m / move-01 :ARG0 (t / they) :ARG2 (c / city))").unwrap();
        assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn canonical_distinguishes_concepts() {
        let a = parse("(a / apple)").unwrap();
        let b = parse("(a / pear)").unwrap();
        assert_ne!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
    }

    #[test]
    fn canonical_is_idempotent() {
        for source in [
            "(m / move-01 :ARG2 (c / city) :ARG0 (t / they) :ARG1 t)",
            "(c / cottage :ARG1-of (k / know-02 :ARG2 (g / miss-green)))",
        ] {
            let g = parse(source).unwrap();
            let once = canonical_form(&g).unwrap();
            let twice = canonical_form(&parse(&once).unwrap()).unwrap();
            assert_eq!(once, twice);
        }
    }
}
