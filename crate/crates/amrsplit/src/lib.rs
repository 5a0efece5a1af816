//! Split AMR semantic graphs into per-predicate subgraphs, build LLM prompts
//! from them, and score chain-of-code execution traces.
//!
//! The pipeline mirrors a sentence-simplification workflow: a PENMAN-notation
//! graph is parsed ([`penman::parse`]), cut into semantic units
//! ([`splitter::split`]), summarized as predicate and entity lists
//! ([`elements`]), and turned into one of six prompting strategies
//! ([`prompts`]). Model responses that follow the chain-of-code protocol are
//! parsed and scored ([`trace`]), and whole corpora move through the system
//! as JSON Lines ([`corpus`]).

pub mod cli;
pub mod corpus;
pub mod elements;
pub mod graph;
pub mod llm;
pub mod penman;
pub mod prompts;
pub mod splitter;
pub mod trace;

pub use corpus::{
    parse_corpus, read_corpus, render_corpus, write_results, BadAmrPolicy, CorpusError,
    CorpusRead, CorpusRecord,
};
pub use elements::{
    anonymize, deanonymize, extract_elements, extract_entities, extract_predicates,
    AnonymizationEntry, AnonymizationMap, ElementList,
};
pub use graph::{AmrGraph, Constant, Edge, GraphError, Target, Var};
pub use llm::{build_request_body, complete, complete_batch, LlmConfig, LlmError};
pub use penman::{canonical_form, parse, serialize, serialize_indent, ParseDiagnostic};
pub use prompts::{build, ChatMessage, PromptError, PromptInputs, PromptPayload, Strategy};
pub use splitter::{node_coverage, split, Origin, Provenance, SplitConfig, SplitResult};
pub use trace::{
    corpus_report, evaluate_trace, parse_trace, synthesize_trace, AggregateReport, CocTrace,
    StepCall, TraceReport, TraceStep,
};
