//! Move a corpus through the pipeline: read JSONL records, split each graph,
//! attach a synthesized trace, and write the results back out.
//!
//! Run with: cargo run -p amrsplit --example corpus_pipeline

use amrsplit::{
    parse, parse_corpus, render_corpus, split, synthesize_trace, BadAmrPolicy, SplitConfig,
};

const CORPUS: &str = r#"{"id":"boy","sentence":"The boy wants the girl to believe him.","amr":"(w / want-01 :ARG0 (b / boy) :ARG1 (bl / believe-01 :ARG0 (g / girl) :ARG1 b))"}
{"id":"cat","sentence":"The cat slept.","amr":"(s / sleep-01 :ARG0 (c / cat))"}
{"id":"broken","sentence":"This record has a bad graph.","amr":"(x / oops"}
{"id":"plain","sentence":"No graph on this one."}
"#;

fn main() {
    // `Skip` drops records whose graph does not parse and reports them;
    // `Fatal` would make the whole read fail instead.
    let read = parse_corpus(CORPUS, BadAmrPolicy::Skip).expect("corpus is structurally valid");
    for warning in &read.warnings {
        eprintln!("warning: {warning}");
    }
    println!("read {} records ({} skipped)\n", read.records.len(), read.warnings.len());

    let mut records = read.records;
    for record in &mut records {
        let Some(amr) = &record.amr else {
            println!("{}: no graph, passing through unchanged", record.id);
            continue;
        };
        let graph = parse(amr).expect("validated by the corpus reader");
        let result = split(&graph, SplitConfig::default()).expect("split succeeds");
        println!("{}: {} subgraph(s)", record.id, result.subgraphs.len());
        record.trace = Some(synthesize_trace(&result));
    }

    // Writing is deterministic: stable field order, one record per line.
    println!("\nresulting corpus:\n{}", render_corpus(&records));
}
