//! The six prompting strategies, assembled as chat payloads.
//!
//! `vanilla` is the plain instruction; `direct-amr` appends the full PENMAN
//! graph; `subgraphs`, `predicates`, and `entities` swap the graph for the
//! corresponding artifact inside the same frame; `amrcoc` asks the model to
//! emulate the splitting algorithm step by step with pseudo-function calls
//! and carries a complete worked example.
//!
//! Templates are fixed byte-for-byte: for a given strategy, everything
//! outside the substituted slots is identical across inputs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::ElementList;
use crate::graph::{AmrGraph, GraphError};
use crate::penman::{serialize, serialize_indent};
use crate::splitter::SplitResult;

/// Which prompt to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "vanilla")]
    Vanilla,
    #[serde(rename = "direct-amr")]
    DirectAmr,
    #[serde(rename = "subgraphs")]
    Subgraphs,
    #[serde(rename = "predicates")]
    Predicates,
    #[serde(rename = "entities")]
    Entities,
    #[serde(rename = "amrcoc")]
    AmrCoc,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Vanilla,
        Strategy::DirectAmr,
        Strategy::Subgraphs,
        Strategy::Predicates,
        Strategy::Entities,
        Strategy::AmrCoc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Vanilla => "vanilla",
            Strategy::DirectAmr => "direct-amr",
            Strategy::Subgraphs => "subgraphs",
            Strategy::Predicates => "predicates",
            Strategy::Entities => "entities",
            Strategy::AmrCoc => "amrcoc",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .iter()
            .find(|strategy| strategy.as_str() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = Strategy::ALL.iter().map(|s| s.as_str()).collect();
                format!("unknown strategy `{s}`; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("strategy `{strategy}` requires {artifact}")]
    MissingArtifact { strategy: Strategy, artifact: &'static str },
    #[error("cannot serialize graph into prompt: {0}")]
    Serialize(#[from] GraphError),
}

/// A prompt ready to send: optional system message, the user message, and an
/// optional assistant prefix the model is asked to continue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPayload {
    pub strategy: Strategy,
    pub system: Option<String>,
    pub user: String,
    pub assistant_prefix: Option<String>,
}

/// One chat message in OpenAI wire shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl PromptPayload {
    /// Export as an ordered chat message list.
    pub fn messages(&self) -> Vec<ChatMessage> {
        let mut messages = Vec::new();
        if let Some(system) = &self.system {
            messages.push(ChatMessage { role: "system".into(), content: system.clone() });
        }
        messages.push(ChatMessage { role: "user".into(), content: self.user.clone() });
        if let Some(prefix) = &self.assistant_prefix {
            messages.push(ChatMessage { role: "assistant".into(), content: prefix.clone() });
        }
        messages
    }
}

/// The artifacts a strategy may need. Fill in what you have; `build` reports
/// which piece is missing for the chosen strategy.
#[derive(Debug, Clone, Copy, Default)]
pub struct PromptInputs<'a> {
    pub graph: Option<&'a AmrGraph>,
    pub split: Option<&'a SplitResult>,
    pub elements: Option<&'a ElementList>,
}

const VANILLA_SYSTEM: &str = "You are a helpful assistant that simplifies syntactic structures.";

const VANILLA_INSTRUCTION: &str =
    "Rewrite the following paragraph using simple sentence structures and no clauses or conjunctions: ";

const FRAME_OPENER: &str =
    "You are given a paragraph and its abstract meaning representation (AMR).";

const SUBGRAPH_SENTENCE: &str =
    "The AMR is split into subgraphs where each subgraph roots at a predicate.";

const FRAME_CLOSER: &str = "Rewrite the paragraph using simple sentence structures and no clauses or conjunctions. You can refer to the provided AMR if it helps you in the rewriting.\nThe rewritten paragraph:";

const AMRCOC_INTRO: &str = "You are given a paragraph and its abstract meaning representation (AMR). AMR captures \"who is doing what to whom\" in a sentence. Begin your steps with # Steps.";

const AMRCOC_FUNCTIONS: &str = "# Functions to process AMR\nEXTRACT_SUBGRAPH(root: Node) -> AMR\nextracts the subgraph rooted at `root`.\nAMR_TO_TEXT(graph: AMR) -> str\nconverts an AMR graph back to text.";

const AMRCOC_EXAMPLE_PROGRAM: &str =
    "# Example program\nfor predicate in amr:\ng = EXTRACT_SUBGRAPH(predicate)\nprint(AMR_TO_TEXT(g))";

/// The complete worked example the model sees before its own input.
pub const AMRCOC_EXAMPLE: &str = "# Steps\n\
g = EXTRACT_SUBGRAPH(flow-01) => (z1 / flow-01 :ARG1 (z2 / it) :ARG2 (z3 / town :name (z4 / name :op1 \"Yeovil\")))\n\
print(AMR_TO_TEXT(g))\n\
=> It flows through the town of Yeovil.\n\
g = EXTRACT_SUBGRAPH(join-01) => (z5 / join-01 :ARG1 (z2 / it) :ARG2 (z6 / river :name (z7 / name :op1 \"River\" :op2 \"Parrett\")))\n\
print(AMR_TO_TEXT(g))\n\
=> It joins River Parrett.\n\
# Output\n\
It flows through the town of Yeovil. It joins River Parrett.";

fn payload(strategy: Strategy, system: Option<&str>, user: String, prefix: Option<&str>) -> PromptPayload {
    PromptPayload {
        strategy,
        system: system.map(str::to_owned),
        user,
        assistant_prefix: prefix.map(str::to_owned),
    }
}

fn frame(header_extra: Option<&str>, sentence: &str, section: &str, body: &str) -> String {
    let opener = match header_extra {
        Some(extra) => format!("{FRAME_OPENER} {extra}"),
        None => FRAME_OPENER.to_owned(),
    };
    format!("{opener}\n# Paragraph\n{sentence}\n# {section}\n{body}\n{FRAME_CLOSER}")
}

/// Build the payload for `strategy` over `sentence`. The graph is serialized
/// on a single line for `direct-amr` and `amrcoc`; subgraphs are indented,
/// one section each, numbered in split order.
pub fn build(
    strategy: Strategy,
    sentence: &str,
    inputs: &PromptInputs,
) -> Result<PromptPayload, PromptError> {
    let need = |artifact: &'static str| PromptError::MissingArtifact { strategy, artifact };
    match strategy {
        Strategy::Vanilla => Ok(payload(
            strategy,
            Some(VANILLA_SYSTEM),
            format!("{VANILLA_INSTRUCTION}{sentence}"),
            None,
        )),
        Strategy::DirectAmr => {
            let graph = inputs.graph.ok_or_else(|| need("a graph"))?;
            let amr = serialize(graph)?;
            Ok(payload(strategy, None, frame(None, sentence, "AMR", &amr), None))
        }
        Strategy::Subgraphs => {
            let split = inputs.split.ok_or_else(|| need("a split result"))?;
            let mut body = String::new();
            for (i, subgraph) in split.subgraphs.iter().enumerate() {
                if i > 0 {
                    body.push('\n');
                }
                body.push_str(&format!("## Subgraph {}\n", i + 1));
                body.push_str(&serialize_indent(subgraph)?);
            }
            Ok(payload(
                strategy,
                None,
                frame(Some(SUBGRAPH_SENTENCE), sentence, "AMR Subgraphs", &body),
                None,
            ))
        }
        Strategy::Predicates => {
            let elements = inputs.elements.ok_or_else(|| need("an element list"))?;
            let body = elements.predicates.join(", ");
            Ok(payload(strategy, None, frame(None, sentence, "Predicates", &body), None))
        }
        Strategy::Entities => {
            let elements = inputs.elements.ok_or_else(|| need("an element list"))?;
            let body = elements.entities.join(", ");
            Ok(payload(strategy, None, frame(None, sentence, "Entities", &body), None))
        }
        Strategy::AmrCoc => {
            let graph = inputs.graph.ok_or_else(|| need("a graph"))?;
            let amr = serialize(graph)?;
            let user = format!(
                "{AMRCOC_INTRO}\n{AMRCOC_FUNCTIONS}\n{AMRCOC_EXAMPLE_PROGRAM}\n\n{AMRCOC_EXAMPLE}\n\n# Paragraph\n{sentence}\n# AMR\n{amr}"
            );
            Ok(payload(strategy, None, user, Some("# Steps")))
        }
    }
}
