//! Chain-of-code transcript parsing and fidelity scoring.
//!
//! A transcript is the assistant's emulated run of the splitting algorithm:
//! `EXTRACT_SUBGRAPH(...)` calls returning PENMAN payloads, `AMR_TO_TEXT`
//! calls returning sentences, and a final `# Output` block. Parsing is total;
//! anything unrecognized becomes an `other` step. Scoring compares the
//! transcript against the real split of the input graph along five axes:
//! call pattern, payload grammaticality, triple/node existence, node
//! coverage, and exact output matching. All content matching is by concept
//! text, never variable names, because models rename variables freely.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{classify_role, deinvert, deinverted_role, AmrGraph, Target};
use crate::penman::{canonical_form, parse, serialize};
use crate::splitter::{split, SplitConfig, SplitResult};

/// What a transcript line invoked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepCall {
    #[serde(rename = "extract-subgraph")]
    ExtractSubgraph,
    #[serde(rename = "amr-to-text")]
    AmrToText,
    #[serde(rename = "other")]
    Other,
}

/// One parsed transcript step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub call: StepCall,
    pub root_argument: Option<String>,
    pub returned_penman: Option<String>,
    pub returned_text: Option<String>,
}

/// A parsed transcript: the steps in order, the text after `# Output`, and
/// the original text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocTrace {
    pub steps: Vec<TraceStep>,
    pub final_output: Option<String>,
    pub raw: String,
}

/// The five fidelity metrics for one transcript, plus human-readable notes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub following_algorithm: bool,
    pub grammatical_amr: f64,
    pub node_edge_existence: f64,
    pub node_coverage: f64,
    pub matching_algorithm_output: bool,
    pub per_step_diagnostics: Vec<String>,
}

/// Corpus-level macro-average of [`TraceReport`]s; booleans average as 0/1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub count: usize,
    pub following_algorithm: f64,
    pub grammatical_amr: f64,
    pub node_edge_existence: f64,
    pub node_coverage: f64,
    pub matching_algorithm_output: f64,
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("cannot aggregate an empty report sequence")]
    EmptyReports,
}

fn extract_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)EXTRACT_SUBGRAPH\s*\(\s*([^()]*?)\s*\)").unwrap())
}

fn to_text_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)AMR_TO_TEXT\s*\(").unwrap())
}

/// Open-paren surplus of `text`, ignoring parens inside string literals.
fn paren_balance(text: &str) -> i64 {
    let mut balance = 0;
    let mut in_string = false;
    for c in text.chars() {
        match c {
            '"' => in_string = !in_string,
            '(' if !in_string => balance += 1,
            ')' if !in_string => balance -= 1,
            _ => {}
        }
    }
    balance
}

fn after_arrow(line: &str, from: usize) -> Option<&str> {
    line[from..].find("=>").map(|i| line[from + i + 2..].trim())
}

fn is_output_marker(line: &str) -> bool {
    line.trim() == "# Output"
}

fn is_steps_marker(line: &str) -> bool {
    line.trim() == "# Steps"
}

fn looks_like_step(line: &str) -> bool {
    extract_re().is_match(line) || to_text_re().is_match(line)
}

/// Parse a transcript. Total: any text yields a trace.
pub fn parse_trace(transcript: &str) -> CocTrace {
    let mut steps = Vec::new();
    let mut output_lines: Option<Vec<&str>> = None;
    let mut lines = transcript.lines().peekable();

    while let Some(line) = lines.next() {
        if let Some(collected) = output_lines.as_mut() {
            collected.push(line);
            continue;
        }
        if is_output_marker(line) {
            output_lines = Some(Vec::new());
            continue;
        }
        if line.trim().is_empty() || is_steps_marker(line) {
            continue;
        }
        if let Some(m) = extract_re().captures(line) {
            let whole = m.get(0).unwrap();
            let root_argument = {
                let arg = m.get(1).unwrap().as_str().trim();
                (!arg.is_empty()).then(|| arg.to_owned())
            };
            let mut payload = after_arrow(line, whole.end()).unwrap_or("").to_owned();
            // a payload may open on the next line or wrap across lines;
            // keep pulling while parentheses stay unbalanced
            if payload.is_empty() {
                if let Some(next) = lines.peek() {
                    if next.trim_start().starts_with('(') && !looks_like_step(next) {
                        payload = lines.next().unwrap().trim().to_owned();
                    }
                }
            }
            while !payload.is_empty() && paren_balance(&payload) > 0 {
                match lines.peek() {
                    Some(next)
                        if !looks_like_step(next) && !is_output_marker(next) =>
                    {
                        payload.push('\n');
                        payload.push_str(lines.next().unwrap());
                    }
                    _ => break,
                }
            }
            steps.push(TraceStep {
                call: StepCall::ExtractSubgraph,
                root_argument,
                returned_penman: (!payload.is_empty()).then_some(payload),
                returned_text: None,
            });
            continue;
        }
        if let Some(m) = to_text_re().find(line) {
            let mut returned_text = after_arrow(line, m.end()).map(str::to_owned);
            if returned_text.is_none() {
                if let Some(next) = lines.peek() {
                    let trimmed = next.trim_start();
                    if let Some(rest) = trimmed.strip_prefix("=>") {
                        returned_text = Some(rest.trim().to_owned());
                        lines.next();
                    }
                }
            }
            steps.push(TraceStep {
                call: StepCall::AmrToText,
                root_argument: None,
                returned_penman: None,
                returned_text: returned_text.filter(|t| !t.is_empty()),
            });
            continue;
        }
        steps.push(TraceStep {
            call: StepCall::Other,
            root_argument: None,
            returned_penman: None,
            returned_text: None,
        });
    }

    let final_output = output_lines.map(|l| l.join("\n").trim().to_owned()).filter(|t| !t.is_empty());
    CocTrace { steps, final_output, raw: transcript.to_owned() }
}

/// Key for concept-level triple and node matching.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum TargetKey {
    Concept(String),
    Constant(String),
}

type Triple = (String, String, TargetKey);

/// Concept-level triples of a graph, with inverse edges between nodes flipped
/// so that written and de-inverted forms of the same relation compare equal.
fn triple_set(graph: &AmrGraph) -> HashSet<Triple> {
    let mut triples = HashSet::new();
    for edge in graph.edges() {
        let source = graph.concept(&edge.source).expect("declared variable").to_owned();
        match &edge.target {
            Target::Var(v) => {
                let target = graph.concept(v).expect("declared variable").to_owned();
                if classify_role(&edge.role).is_inverse {
                    triples.insert((target, deinverted_role(&edge.role), TargetKey::Concept(source)));
                } else {
                    triples.insert((source, edge.role.clone(), TargetKey::Concept(target)));
                }
            }
            Target::Constant(c) => {
                triples.insert((source, edge.role.clone(), TargetKey::Constant(c.to_string())));
            }
        }
    }
    triples
}

fn concept_counts(graph: &AmrGraph) -> HashMap<&str, usize> {
    let mut counts = HashMap::new();
    for (_, concept) in graph.nodes() {
        *counts.entry(concept).or_insert(0) += 1;
    }
    counts
}

/// True iff the trace has at least one extract step and every extract step
/// is eventually followed by an amr-to-text step before the next extract.
fn follows_algorithm(steps: &[TraceStep]) -> bool {
    let mut seen_extract = false;
    let mut pending_extract = false;
    for step in steps {
        match step.call {
            StepCall::ExtractSubgraph => {
                if pending_extract {
                    return false;
                }
                seen_extract = true;
                pending_extract = true;
            }
            StepCall::AmrToText => pending_extract = false,
            StepCall::Other => {}
        }
    }
    seen_extract && !pending_extract
}

/// Score one transcript against the input graph and splitting config.
pub fn evaluate_trace(trace: &CocTrace, input: &AmrGraph, config: SplitConfig) -> TraceReport {
    let mut diagnostics = Vec::new();

    let following_algorithm = follows_algorithm(&trace.steps);
    if !following_algorithm {
        diagnostics.push(
            "call pattern does not alternate EXTRACT_SUBGRAPH with AMR_TO_TEXT".to_owned(),
        );
    }

    // parse every extract payload
    let mut payload_count = 0usize;
    let mut parsed: Vec<AmrGraph> = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        if step.call != StepCall::ExtractSubgraph {
            continue;
        }
        let Some(penman) = &step.returned_penman else {
            diagnostics.push(format!("step {}: EXTRACT_SUBGRAPH returned no payload", i + 1));
            continue;
        };
        payload_count += 1;
        match parse(penman) {
            Ok(graph) => parsed.push(graph),
            Err(diags) => {
                let first = diags
                    .first()
                    .map(ToString::to_string)
                    .unwrap_or_else(|| "unknown parse failure".to_owned());
                diagnostics.push(format!("step {}: payload does not parse: {first}", i + 1));
            }
        }
    }
    let grammatical_amr = if payload_count == 0 {
        0.0
    } else {
        parsed.len() as f64 / payload_count as f64
    };

    // reference views of the input
    let reference = deinvert(input).map(|(g, _)| g).unwrap_or_else(|_| input.clone());
    let reference_triples = triple_set(&reference);
    let reference_concepts: HashSet<&str> = reference.nodes().map(|(_, c)| c).collect();

    // existence: every payload concept and triple must appear in the input
    let mut items = 0usize;
    let mut matched = 0usize;
    for graph in &parsed {
        for (_, concept) in graph.nodes() {
            items += 1;
            if reference_concepts.contains(concept) {
                matched += 1;
            } else {
                diagnostics.push(format!("concept `{concept}` does not exist in the input"));
            }
        }
        for triple in triple_set(graph) {
            items += 1;
            if reference_triples.contains(&triple) {
                matched += 1;
            } else {
                let target = match &triple.2 {
                    TargetKey::Concept(c) => c.clone(),
                    TargetKey::Constant(c) => c.clone(),
                };
                diagnostics.push(format!(
                    "edge ({} {} {}) does not exist in the input",
                    triple.0, triple.1, target
                ));
            }
        }
    }
    let node_edge_existence = if items == 0 { 0.0 } else { matched as f64 / items as f64 };

    // coverage: multiset of input concepts matched by the payload union
    let input_counts = concept_counts(&reference);
    let mut union_counts: HashMap<&str, usize> = HashMap::new();
    for graph in &parsed {
        for (_, concept) in graph.nodes() {
            *union_counts.entry(concept).or_insert(0) += 1;
        }
    }
    let covered: usize = input_counts
        .iter()
        .map(|(concept, &need)| need.min(union_counts.get(*concept).copied().unwrap_or(0)))
        .sum();
    let node_coverage = if reference.node_count() == 0 {
        0.0
    } else {
        covered as f64 / reference.node_count() as f64
    };

    // exact matching against the real split, canonical set vs canonical set
    let matching_algorithm_output = match split(input, config) {
        Ok(SplitResult { subgraphs, .. }) => {
            let expected: BTreeSet<String> = subgraphs
                .iter()
                .map(|g| canonical_form(g).expect("split subgraphs are serializable"))
                .collect();
            let got: BTreeSet<String> = parsed
                .iter()
                .filter_map(|g| canonical_form(g).ok())
                .collect();
            if got != expected {
                diagnostics.push(format!(
                    "payload set does not match the algorithm output ({} payload form(s) vs {} expected)",
                    got.len(),
                    expected.len()
                ));
            }
            got == expected
        }
        Err(e) => {
            diagnostics.push(format!("input could not be split: {e}"));
            false
        }
    };

    TraceReport {
        following_algorithm,
        grammatical_amr,
        node_edge_existence,
        node_coverage,
        matching_algorithm_output,
        per_step_diagnostics: diagnostics,
    }
}

/// Macro-average reports; errors on an empty slice.
pub fn corpus_report(reports: &[TraceReport]) -> Result<AggregateReport, TraceError> {
    if reports.is_empty() {
        return Err(TraceError::EmptyReports);
    }
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&TraceReport) -> f64| reports.iter().map(|r| f(r)).sum::<f64>() / n;
    Ok(AggregateReport {
        count: reports.len(),
        following_algorithm: mean(&|r| r.following_algorithm as u8 as f64),
        grammatical_amr: mean(&|r| r.grammatical_amr),
        node_edge_existence: mean(&|r| r.node_edge_existence),
        node_coverage: mean(&|r| r.node_coverage),
        matching_algorithm_output: mean(&|r| r.matching_algorithm_output as u8 as f64),
    })
}

/// Render the transcript a faithful emulator would produce for `result`:
/// one extract/print pair per subgraph and a combined `# Output` block.
/// Useful as a self-consistency oracle and for demos.
pub fn synthesize_trace(result: &SplitResult) -> String {
    let mut out = String::from("# Steps\n");
    let mut sentences = Vec::new();
    for (i, subgraph) in result.subgraphs.iter().enumerate() {
        let concept = subgraph
            .concept(subgraph.root())
            .expect("subgraph root is declared");
        let penman = serialize(subgraph).expect("split subgraphs are serializable");
        let sentence = format!("Sentence {} about {}.", i + 1, concept);
        out.push_str(&format!("g = EXTRACT_SUBGRAPH({concept}) => {penman}\n"));
        out.push_str("print(AMR_TO_TEXT(g))\n");
        out.push_str(&format!("=> {sentence}\n"));
        sentences.push(sentence);
    }
    out.push_str("# Output\n");
    out.push_str(&sentences.join(" "));
    out
}
