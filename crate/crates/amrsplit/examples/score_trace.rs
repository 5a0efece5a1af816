//! Parse a model's chain-of-code transcript and score it against the graph
//! it claims to process.
//!
//! Run with: cargo run -p amrsplit --example score_trace

use amrsplit::{
    corpus_report, evaluate_trace, parse, parse_trace, split, synthesize_trace, SplitConfig,
    StepCall,
};

const SOURCE: &str = "(m / move-01 :time (d / date-entity :year 1935) :ARG0 (t / they) \
 :purpose (lv / live-01 :ARG0 t :location (c / city :name (cn / name :op1 \"Chaldon\")) :time d) \
 :ARG2 (loc / location :name (ln / name :op1 \"24\" :op2 \"West\" :op3 \"Chaldon\") \
 :ARG1-of (k / know-02 :ARG2 (kn / name :op1 \"Miss\" :op2 \"Green\"))))";

// A transcript with two honest steps and one invented concept (`swim-01`
// appears nowhere in the graph), so the fidelity metrics drop below 1.
const FLAWED_TRANSCRIPT: &str = "\
# Steps
g = EXTRACT_SUBGRAPH(move-01) => (z0 / move-01 :ARG0 (z1 / they) :time (z2 / date-entity :year 1935))
print(AMR_TO_TEXT(g))
=> They moved in 1935.
g = EXTRACT_SUBGRAPH(swim-01) => (z3 / swim-01 :ARG0 (z1 / they))
print(AMR_TO_TEXT(g))
=> They swam.
# Output
They moved in 1935. They swam.";

fn main() {
    let graph = parse(SOURCE).expect("well-formed sample");
    let config = SplitConfig::default();

    let flawed = parse_trace(FLAWED_TRANSCRIPT);
    println!("parsed {} steps from the flawed transcript:", flawed.steps.len());
    for step in &flawed.steps {
        match step.call {
            StepCall::ExtractSubgraph => println!(
                "  EXTRACT_SUBGRAPH({})",
                step.root_argument.as_deref().unwrap_or("?")
            ),
            StepCall::AmrToText => println!(
                "  AMR_TO_TEXT -> {:?}",
                step.returned_text.as_deref().unwrap_or("")
            ),
            StepCall::Other => println!("  (unrecognized call)"),
        }
    }
    println!("final output: {:?}\n", flawed.final_output);

    let flawed_report = evaluate_trace(&flawed, &graph, config);
    println!("flawed transcript scores:");
    println!("  following_algorithm      {}", flawed_report.following_algorithm);
    println!("  grammatical_amr          {:.3}", flawed_report.grammatical_amr);
    println!("  node_edge_existence      {:.3}", flawed_report.node_edge_existence);
    println!("  node_coverage            {:.3}", flawed_report.node_coverage);
    println!("  matching_algorithm_output {}", flawed_report.matching_algorithm_output);

    // A transcript synthesized from the splitter itself scores perfectly —
    // handy as a ceiling and for testing scoring pipelines.
    let ideal_text = synthesize_trace(&split(&graph, config).unwrap());
    let ideal_report = evaluate_trace(&parse_trace(&ideal_text), &graph, config);
    println!("\nsynthesized transcript matching: {}", ideal_report.matching_algorithm_output);

    let aggregate = corpus_report(&[flawed_report, ideal_report]).unwrap();
    println!(
        "\naggregate over both transcripts: coverage {:.3}, matching {:.1}",
        aggregate.node_coverage, aggregate.matching_algorithm_output
    );
}
