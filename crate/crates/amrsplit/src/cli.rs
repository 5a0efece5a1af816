//! Command-line interface.
//!
//! Every subcommand runs in-process through [`run`], which returns the exit
//! code plus captured stdout/stderr instead of touching the real process
//! streams; the binary is a thin wrapper around it. Exit codes follow the
//! usual convention: 0 success, 1 domain error (bad input data, endpoint
//! failures), 2 usage error (bad flags or flag combinations).
//!
//! Inputs are either a PENMAN file (one graph) or a JSON Lines corpus; a
//! `.jsonl` extension selects the corpus reader. Stdout carries only
//! machine-readable output — JSON documents carry `"schema_version": "1"` —
//! while diagnostics and progress notes go to stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::corpus::{self, BadAmrPolicy, CorpusRead, CorpusRecord};
use crate::elements::{extract_elements, extract_entities, extract_predicates, ElementList};
use crate::graph::AmrGraph;
use crate::llm::{self, LlmConfig, DEFAULT_API_KEY_ENV};
use crate::penman;
use crate::prompts::{self, PromptPayload, Strategy};
use crate::splitter::{split, SplitConfig, SplitResult};
use crate::trace::{corpus_report, evaluate_trace, parse_trace};

/// Current version of every JSON document the CLI prints.
pub const SCHEMA_VERSION: &str = "1";

/// Result of one in-process CLI invocation.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    /// 0 = success, 1 = domain error, 2 = usage error.
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(
    name = "amrsplit",
    version,
    about = "Split AMR graphs into per-predicate subgraphs, build LLM prompts, and score chain-of-code traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a graph into per-predicate subgraphs with provenance
    Split(SplitArgs),
    /// List the predicates or entities of a graph
    Elements(ElementsArgs),
    /// Build prompt payloads for one strategy
    Prompt(PromptArgs),
    /// Send prompts to an OpenAI-compatible endpoint and collect completions
    Run(RunArgs),
    /// Score chain-of-code traces against their graphs
    ValidateTrace(ValidateTraceArgs),
    /// Syntax-check PENMAN input
    Parse(ParseArgs),
    /// Print the canonical form of a graph
    Canon(CanonArgs),
}

#[derive(Args, Debug)]
struct SplitArgs {
    /// PENMAN file or `.jsonl` corpus
    input: PathBuf,
    /// Argument-count threshold for extracting large predicates
    #[arg(long, default_value_t = 2)]
    sigma: usize,
    /// Do not extract predicates reached through inverse relations
    #[arg(long)]
    no_rule3: bool,
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Penman,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("kind").required(true).multiple(false))]
struct ElementsArgs {
    /// PENMAN file or `.jsonl` corpus
    input: PathBuf,
    /// List predicate lemmas
    #[arg(long, group = "kind")]
    predicates: bool,
    /// List entity descriptions
    #[arg(long, group = "kind")]
    entities: bool,
}

#[derive(Args, Debug)]
struct PromptArgs {
    /// PENMAN file or `.jsonl` corpus
    input: PathBuf,
    /// Prompting strategy: vanilla, direct-amr, subgraphs, predicates, entities, amrcoc
    #[arg(long)]
    strategy: Strategy,
    /// Sentence to pair with a bare PENMAN input (corpora carry their own)
    #[arg(long)]
    sentence: Option<String>,
    /// Write payloads here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Argument-count threshold used by the subgraphs strategy
    #[arg(long, default_value_t = 2)]
    sigma: usize,
    /// Disable inverse-relation extraction for the subgraphs strategy
    #[arg(long)]
    no_rule3: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// `.jsonl` corpus of records to complete
    input: PathBuf,
    /// Prompting strategy
    #[arg(long)]
    strategy: Strategy,
    /// Base URL of the OpenAI-compatible endpoint, e.g. http://host/v1
    #[arg(long)]
    endpoint: String,
    /// Model identifier
    #[arg(long)]
    model: String,
    /// Environment variable that holds the API key (the key itself is never a flag)
    #[arg(long, default_value = DEFAULT_API_KEY_ENV)]
    api_key_env: String,
    /// Per-request timeout in seconds
    #[arg(long, default_value_t = 60)]
    timeout_secs: u64,
    /// Maximum concurrent requests
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Sampling temperature
    #[arg(long, default_value_t = 0.0)]
    temperature: f64,
    /// Write completed records here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Argument-count threshold used by the subgraphs strategy
    #[arg(long, default_value_t = 2)]
    sigma: usize,
    /// Disable inverse-relation extraction for the subgraphs strategy
    #[arg(long)]
    no_rule3: bool,
}

#[derive(Args, Debug)]
struct ValidateTraceArgs {
    /// `.jsonl` corpus whose records carry `amr` and `trace` fields
    input: PathBuf,
    /// Argument-count threshold for the reference split
    #[arg(long, default_value_t = 2)]
    sigma: usize,
    /// Disable inverse-relation extraction for the reference split
    #[arg(long)]
    no_rule3: bool,
}

#[derive(Args, Debug)]
struct ParseArgs {
    /// PENMAN file or `.jsonl` corpus
    input: PathBuf,
}

#[derive(Args, Debug)]
struct CanonArgs {
    /// PENMAN file or `.jsonl` corpus
    input: PathBuf,
}

/// A command failure: exit code 1 (domain) or 2 (usage) plus a message for
/// stderr. Output already written to the buffers is preserved, so partial
/// results still reach the caller.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

type CmdResult = Result<(), Failure>;

/// Parse `args` (including the program name) and execute the subcommand.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap reports usage errors as 2 and --help/--version as 0
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                CommandOutcome { exit_code: e.exit_code(), stdout: String::new(), stderr: rendered }
            } else {
                CommandOutcome { exit_code: e.exit_code(), stdout: rendered, stderr: String::new() }
            };
        }
    };

    let mut out = String::new();
    let mut err = String::new();
    let result = match &cli.command {
        Command::Split(args) => cmd_split(args, &mut out, &mut err),
        Command::Elements(args) => cmd_elements(args, &mut out, &mut err),
        Command::Prompt(args) => cmd_prompt(args, &mut out, &mut err),
        Command::Run(args) => cmd_run(args, &mut out, &mut err),
        Command::ValidateTrace(args) => cmd_validate_trace(args, &mut out, &mut err),
        Command::Parse(args) => cmd_parse(args, &mut out, &mut err),
        Command::Canon(args) => cmd_canon(args, &mut out, &mut err),
    };
    match result {
        Ok(()) => CommandOutcome { exit_code: 0, stdout: out, stderr: err },
        Err(failure) => {
            if !failure.message.is_empty() {
                let _ = writeln!(err, "error: {}", failure.message);
            }
            CommandOutcome { exit_code: failure.code, stdout: out, stderr: err }
        }
    }
}

// ---------------------------------------------------------------------------
// input loading

enum LoadedInput {
    Single { id: String, graph: AmrGraph },
    Corpus(CorpusRead),
}

fn is_corpus_path(path: &Path) -> bool {
    path.extension().map(|e| e.eq_ignore_ascii_case("jsonl")).unwrap_or(false)
}

fn read_input_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::domain(format!("cannot read {}: {e}", path.display())))
}

fn parse_single(path: &Path, text: &str) -> Result<LoadedInput, Failure> {
    let graph = penman::parse(text).map_err(|diags| {
        let mut message = format!("{} is not a valid PENMAN graph:", path.display());
        for diag in &diags {
            let _ = write!(message, "\n  {diag}");
        }
        Failure::domain(message)
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".to_owned());
    Ok(LoadedInput::Single { id, graph })
}

/// Load a PENMAN file or corpus; corpus warnings go to `err`.
fn load_input(path: &Path, err: &mut String) -> Result<LoadedInput, Failure> {
    let text = read_input_file(path)?;
    if is_corpus_path(path) {
        let read = corpus::parse_corpus(&text, BadAmrPolicy::Skip)
            .map_err(|e| Failure::domain(e.to_string()))?;
        for warning in &read.warnings {
            let _ = writeln!(err, "warning: {warning}");
        }
        Ok(LoadedInput::Corpus(read))
    } else {
        parse_single(path, &text)
    }
}

fn require_corpus(path: &Path, command: &str, err: &mut String) -> Result<CorpusRead, Failure> {
    if !is_corpus_path(path) {
        return Err(Failure::usage(format!(
            "`{command}` needs a .jsonl corpus input, got {}",
            path.display()
        )));
    }
    match load_input(path, err)? {
        LoadedInput::Corpus(read) => Ok(read),
        LoadedInput::Single { .. } => unreachable!("corpus extension always loads a corpus"),
    }
}

/// Parse a corpus record's graph. Records passed corpus validation, so a
/// failure here indicates a logic error; report it as a domain error anyway.
fn record_graph(record: &CorpusRecord) -> Result<Option<AmrGraph>, Failure> {
    match &record.amr {
        None => Ok(None),
        Some(amr) => penman::parse(amr).map(Some).map_err(|diags| {
            let first = diags.first().map(ToString::to_string).unwrap_or_default();
            Failure::domain(format!("record `{}`: amr does not parse: {first}", record.id))
        }),
    }
}

fn pretty(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("CLI output serializes");
    text.push('\n');
    text
}

fn jsonl_line(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string(value).expect("CLI output serializes");
    text.push('\n');
    text
}

/// Write `payload` to `--out` if given, else to stdout.
fn deliver(out_path: &Option<PathBuf>, payload: &str, out: &mut String, err: &mut String) -> CmdResult {
    match out_path {
        None => {
            out.push_str(payload);
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, payload)
                .map_err(|e| Failure::domain(format!("cannot write {}: {e}", path.display())))?;
            let _ = writeln!(err, "wrote {} bytes to {}", payload.len(), path.display());
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// split

#[derive(Serialize)]
struct SubgraphJson {
    root: String,
    origin: &'static str,
    penman: String,
}

#[derive(Serialize)]
struct SplitRecordJson {
    id: String,
    subgraphs: Vec<SubgraphJson>,
}

#[derive(Serialize)]
struct SplitJson {
    schema_version: &'static str,
    records: Vec<SplitRecordJson>,
}

fn split_record(id: &str, graph: &AmrGraph, config: SplitConfig) -> Result<SplitRecordJson, Failure> {
    let result = split(graph, config).map_err(|e| Failure::domain(format!("record `{id}`: {e}")))?;
    let mut subgraphs = Vec::new();
    for (subgraph, provenance) in result.subgraphs.iter().zip(&result.provenance) {
        let penman = penman::serialize(subgraph)
            .map_err(|e| Failure::domain(format!("record `{id}`: {e}")))?;
        subgraphs.push(SubgraphJson {
            root: provenance.root.as_str().to_owned(),
            origin: provenance.origin.as_str(),
            penman,
        });
    }
    Ok(SplitRecordJson { id: id.to_owned(), subgraphs })
}

fn render_split_penman(records: &[SplitRecordJson]) -> Result<String, Failure> {
    let mut text = String::new();
    for record in records {
        let _ = writeln!(text, "# record {}", record.id);
        for (i, subgraph) in record.subgraphs.iter().enumerate() {
            let graph = penman::parse(&subgraph.penman)
                .map_err(|_| Failure::domain("internal serialization error"))?;
            let block = penman::serialize_indent(&graph)
                .map_err(|e| Failure::domain(e.to_string()))?;
            let _ = writeln!(
                text,
                "# subgraph {} of {}: root={} origin={}",
                i + 1,
                record.subgraphs.len(),
                subgraph.root,
                subgraph.origin
            );
            text.push_str(&block);
            text.push_str("\n\n");
        }
    }
    Ok(text)
}

fn cmd_split(args: &SplitArgs, out: &mut String, err: &mut String) -> CmdResult {
    let config = SplitConfig { sigma: args.sigma, apply_rule3: !args.no_rule3 };
    let mut records = Vec::new();
    match load_input(&args.input, err)? {
        LoadedInput::Single { id, graph } => {
            records.push(split_record(&id, &graph, config)?);
        }
        LoadedInput::Corpus(read) => {
            for record in &read.records {
                match record_graph(record)? {
                    Some(graph) => records.push(split_record(&record.id, &graph, config)?),
                    None => {
                        let _ = writeln!(
                            err,
                            "warning: record `{}` has no amr field; skipped",
                            record.id
                        );
                    }
                }
            }
        }
    }
    match args.format {
        OutputFormat::Json => {
            out.push_str(&pretty(&SplitJson { schema_version: SCHEMA_VERSION, records }));
        }
        OutputFormat::Penman => out.push_str(&render_split_penman(&records)?),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// elements

fn cmd_elements(args: &ElementsArgs, out: &mut String, err: &mut String) -> CmdResult {
    let field = if args.predicates { "predicates" } else { "entities" };
    let list = |graph: &AmrGraph| -> Vec<String> {
        if args.predicates {
            extract_predicates(graph)
        } else {
            extract_entities(graph)
        }
    };
    match load_input(&args.input, err)? {
        LoadedInput::Single { graph, .. } => {
            out.push_str(&jsonl_line(&list(&graph)));
        }
        LoadedInput::Corpus(read) => {
            for record in &read.records {
                match record_graph(record)? {
                    Some(graph) => {
                        out.push_str(&jsonl_line(&json!({
                            "id": record.id,
                            field: list(&graph),
                        })));
                    }
                    None => {
                        let _ = writeln!(
                            err,
                            "warning: record `{}` has no amr field; skipped",
                            record.id
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// prompt

/// Build the payload for one record, deriving only the artifacts the strategy
/// needs. `amr` may be absent; strategies that need it report a domain error.
fn build_payload(
    id: &str,
    sentence: &str,
    graph: Option<&AmrGraph>,
    strategy: Strategy,
    config: SplitConfig,
) -> Result<PromptPayload, Failure> {
    let split_result: Option<SplitResult> = match (graph, strategy) {
        (Some(g), Strategy::Subgraphs) => {
            Some(split(g, config).map_err(|e| Failure::domain(format!("record `{id}`: {e}")))?)
        }
        _ => None,
    };
    let element_list: Option<ElementList> = match (graph, strategy) {
        (Some(g), Strategy::Predicates | Strategy::Entities) => Some(extract_elements(g)),
        _ => None,
    };
    let inputs = prompts::PromptInputs {
        graph,
        split: split_result.as_ref(),
        elements: element_list.as_ref(),
    };
    prompts::build(strategy, sentence, &inputs)
        .map_err(|e| Failure::domain(format!("record `{id}`: {e}")))
}

#[derive(Serialize)]
struct PromptJson {
    schema_version: &'static str,
    id: String,
    strategy: &'static str,
    messages: Vec<crate::prompts::ChatMessage>,
}

fn cmd_prompt(args: &PromptArgs, out: &mut String, err: &mut String) -> CmdResult {
    let config = SplitConfig { sigma: args.sigma, apply_rule3: !args.no_rule3 };
    let mut rendered = String::new();
    match load_input(&args.input, err)? {
        LoadedInput::Single { id, graph } => {
            let sentence = args.sentence.as_deref().ok_or_else(|| {
                Failure::usage("a bare PENMAN input needs --sentence; corpora carry their own")
            })?;
            let payload = build_payload(&id, sentence, Some(&graph), args.strategy, config)?;
            rendered = pretty(&PromptJson {
                schema_version: SCHEMA_VERSION,
                id,
                strategy: args.strategy.as_str(),
                messages: payload.messages(),
            });
        }
        LoadedInput::Corpus(read) => {
            for record in &read.records {
                let graph = record_graph(record)?;
                let payload =
                    build_payload(&record.id, &record.sentence, graph.as_ref(), args.strategy, config)?;
                rendered.push_str(&jsonl_line(&PromptJson {
                    schema_version: SCHEMA_VERSION,
                    id: record.id.clone(),
                    strategy: args.strategy.as_str(),
                    messages: payload.messages(),
                }));
            }
        }
    }
    deliver(&args.out, &rendered, out, err)
}

// ---------------------------------------------------------------------------
// run

fn cmd_run(args: &RunArgs, out: &mut String, err: &mut String) -> CmdResult {
    let read = require_corpus(&args.input, "run", err)?;
    let llm_config = LlmConfig {
        endpoint: args.endpoint.clone(),
        model: args.model.clone(),
        api_key_env: args.api_key_env.clone(),
        timeout_secs: args.timeout_secs,
        max_parallel: args.parallel,
        temperature: args.temperature,
    };
    llm_config.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let split_config = SplitConfig { sigma: args.sigma, apply_rule3: !args.no_rule3 };

    let mut records = read.records;
    let mut failures = 0usize;
    let mut batch: Vec<(usize, PromptPayload)> = Vec::new();
    for (index, record) in records.iter().enumerate() {
        let graph = record_graph(record)?;
        match build_payload(&record.id, &record.sentence, graph.as_ref(), args.strategy, split_config)
        {
            Ok(payload) => batch.push((index, payload)),
            Err(failure) => {
                failures += 1;
                let _ = writeln!(err, "error: {}", failure.message);
            }
        }
    }

    let payloads: Vec<PromptPayload> = batch.iter().map(|(_, p)| p.clone()).collect();
    let results =
        llm::complete_batch(&llm_config, &payloads).map_err(|e| Failure::domain(e.to_string()))?;
    for ((index, _), result) in batch.into_iter().zip(results) {
        match result {
            Ok(completion) => records[index].completion = Some(completion),
            Err(e) => {
                failures += 1;
                let _ = writeln!(err, "error: record `{}`: {e}", records[index].id);
            }
        }
    }

    let rendered = corpus::render_corpus(&records);
    deliver(&args.out, &rendered, out, err)?;
    if failures > 0 {
        return Err(Failure::domain(format!(
            "partial results: {failures} of {} record(s) failed; completed records were still written",
            records.len()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// validate-trace

fn cmd_validate_trace(args: &ValidateTraceArgs, out: &mut String, err: &mut String) -> CmdResult {
    let read = require_corpus(&args.input, "validate-trace", err)?;
    let config = SplitConfig { sigma: args.sigma, apply_rule3: !args.no_rule3 };
    let mut records_json = Vec::new();
    let mut reports = Vec::new();
    for record in &read.records {
        let Some(graph) = record_graph(record)? else {
            let _ = writeln!(err, "warning: record `{}` has no amr field; skipped", record.id);
            continue;
        };
        let Some(trace_text) = &record.trace else {
            let _ = writeln!(err, "warning: record `{}` has no trace field; skipped", record.id);
            continue;
        };
        let trace = parse_trace(trace_text);
        let report = evaluate_trace(&trace, &graph, config);
        records_json.push(json!({
            "id": record.id,
            "report": report,
        }));
        reports.push(report);
    }
    let aggregate = corpus_report(&reports)
        .map_err(|_| Failure::domain("no record carried both an amr and a trace field"))?;
    out.push_str(&pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "records": records_json,
        "aggregate": aggregate,
    })));
    Ok(())
}

// ---------------------------------------------------------------------------
// parse / canon

fn cmd_parse(args: &ParseArgs, out: &mut String, err: &mut String) -> CmdResult {
    let text = read_input_file(&args.input)?;
    let mut graphs = Vec::new();
    let mut failed = 0usize;
    let mut checked = 0usize;
    if is_corpus_path(&args.input) {
        let read = corpus::parse_corpus(&text, BadAmrPolicy::Skip)
            .map_err(|e| Failure::domain(e.to_string()))?;
        failed = read.warnings.len();
        for warning in &read.warnings {
            let _ = writeln!(err, "{warning}");
        }
        for record in &read.records {
            if let Some(graph) = record_graph(record)? {
                checked += 1;
                graphs.push(json!({
                    "id": record.id,
                    "nodes": graph.node_count(),
                    "edges": graph.edge_count(),
                }));
            }
        }
        checked += failed;
    } else {
        checked = 1;
        match parse_single(&args.input, &text) {
            Ok(LoadedInput::Single { id, graph }) => {
                graphs.push(json!({
                    "id": id,
                    "nodes": graph.node_count(),
                    "edges": graph.edge_count(),
                }));
            }
            Ok(LoadedInput::Corpus(_)) => unreachable!("single path never loads a corpus"),
            Err(failure) => {
                failed = 1;
                let _ = writeln!(err, "{}", failure.message);
            }
        }
    }
    out.push_str(&pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "checked": checked,
        "failed": failed,
        "graphs": graphs,
    })));
    if failed > 0 {
        return Err(Failure::domain(format!("{failed} input(s) failed to parse")));
    }
    Ok(())
}

fn cmd_canon(args: &CanonArgs, out: &mut String, err: &mut String) -> CmdResult {
    match load_input(&args.input, err)? {
        LoadedInput::Single { graph, .. } => {
            let canonical =
                penman::canonical_form(&graph).map_err(|e| Failure::domain(e.to_string()))?;
            out.push_str(&canonical);
            out.push('\n');
        }
        LoadedInput::Corpus(read) => {
            for record in &read.records {
                match record_graph(record)? {
                    Some(graph) => {
                        let canonical = penman::canonical_form(&graph)
                            .map_err(|e| Failure::domain(e.to_string()))?;
                        out.push_str(&jsonl_line(&json!({
                            "id": record.id,
                            "canonical": canonical,
                        })));
                    }
                    None => {
                        let _ = writeln!(
                            err,
                            "warning: record `{}` has no amr field; skipped",
                            record.id
                        );
                    }
                }
            }
        }
    }
    Ok(())
}
