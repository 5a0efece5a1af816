//! Parse PENMAN notation, inspect the graph, and serialize it back.
//!
//! Run with: cargo run -p amrsplit --example parse_graph

use amrsplit::{parse, serialize, serialize_indent, Target};

const SOURCE: &str = "\
# The sentence: In 1935 they moved to 24 West Chaldon,
# as the cottage was known to Miss Green.
(m / move-01~e.3
   :time (d / date-entity :year 1935)
   :ARG0 (t / they)
   :purpose (lv / live-01
      :ARG0 t
      :location (c / city :name (cn / name :op1 \"Chaldon\"))
      :time d)
   :ARG2 (loc / location
      :name (ln / name :op1 \"24\" :op2 \"West\" :op3 \"Chaldon\")
      :ARG1-of (k / know-02
         :ARG2 (kn / name :op1 \"Miss\" :op2 \"Green\"))))";

fn main() {
    // Comments and ~alignment markers are stripped during tokenization.
    let graph = parse(SOURCE).expect("the sample graph is well formed");

    println!("root: {}", graph.root().as_str());
    println!("{} nodes, {} edges\n", graph.node_count(), graph.edge_count());

    println!("nodes (in order of declaration):");
    for (var, concept) in graph.nodes() {
        println!("  {:4} / {concept}", var.as_str());
    }

    println!("\nedges from the root:");
    for edge in graph.outgoing(graph.root()) {
        let target = match &edge.target {
            Target::Var(v) => format!("variable {}", v.as_str()),
            Target::Constant(c) => format!("constant {c}"),
        };
        println!("  {} -> {target}", edge.role);
    }

    println!("\nsingle-line serialization:\n{}", serialize(&graph).unwrap());
    println!("\nindented serialization:\n{}", serialize_indent(&graph).unwrap());

    // A malformed graph produces positioned diagnostics instead of a panic.
    let broken = "(a / apple :ARG0 (b / banana";
    match parse(broken) {
        Ok(_) => unreachable!(),
        Err(diagnostics) => {
            println!("\ndiagnostics for {broken:?}:");
            for diagnostic in diagnostics {
                println!("  {diagnostic}");
            }
        }
    }
}
