//! Split one AMR graph into per-predicate subgraphs and show where each
//! subgraph came from.
//!
//! Run with: cargo run -p amrsplit --example split_graph

use amrsplit::{node_coverage, parse, serialize_indent, split, SplitConfig};

const SOURCE: &str = "(m / move-01 :time (d / date-entity :year 1935) :ARG0 (t / they) \
 :purpose (lv / live-01 :ARG0 t :location (c / city :name (cn / name :op1 \"Chaldon\")) :time d) \
 :ARG2 (loc / location :name (ln / name :op1 \"24\" :op2 \"West\" :op3 \"Chaldon\") \
 :ARG1-of (k / know-02 :ARG2 (kn / name :op1 \"Miss\" :op2 \"Green\"))))";

fn main() {
    let graph = parse(SOURCE).expect("well-formed sample");

    // Default config: argument-count threshold 2, inverse-relation extraction on.
    let config = SplitConfig::default();
    let result = split(&graph, config).expect("split succeeds");

    println!("split into {} subgraphs (sigma = {}):\n", result.subgraphs.len(), config.sigma);
    for (subgraph, provenance) in result.subgraphs.iter().zip(&result.provenance) {
        println!(
            "--- rooted at `{}` ({}), selected by {}",
            provenance.root.as_str(),
            subgraph.concept(&provenance.root).unwrap(),
            provenance.origin.as_str(),
        );
        println!("{}\n", serialize_indent(subgraph).unwrap());
    }

    // Every input node appears in at least one subgraph.
    println!("node coverage: {}", node_coverage(&graph, &result.subgraphs));

    // Turning off inverse-relation extraction keeps `know-02` embedded in the
    // subgraph that mentions it instead of giving it a subgraph of its own.
    let without = split(&graph, SplitConfig { sigma: 2, apply_rule3: false }).unwrap();
    println!(
        "\nwithout inverse-relation extraction: {} subgraphs rooted at {:?}",
        without.subgraphs.len(),
        without
            .provenance
            .iter()
            .map(|p| p.root.as_str().to_owned())
            .collect::<Vec<_>>(),
    );
}
