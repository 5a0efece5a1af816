//! Extract the predicate and entity lists that summarize a graph.
//!
//! Run with: cargo run -p amrsplit --example list_elements

use amrsplit::{extract_elements, parse};

const SOURCE: &str = "(m / move-01 :time (d / date-entity :year 1935) :ARG0 (t / they) \
 :purpose (lv / live-01 :ARG0 t :location (c / city :name (cn / name :op1 \"Chaldon\")) :time d) \
 :ARG2 (loc / location :name (ln / name :op1 \"24\" :op2 \"West\" :op3 \"Chaldon\") \
 :ARG1-of (k / know-02 :ARG2 (kn / name :op1 \"Miss\" :op2 \"Green\"))))";

fn main() {
    let graph = parse(SOURCE).expect("well-formed sample");
    let elements = extract_elements(&graph);

    // Predicates are frame lemmas (the sense suffix is dropped), listed in
    // depth-first order.
    println!("predicates:");
    for predicate in &elements.predicates {
        println!("  {predicate}");
    }

    // Entities are the non-predicate nodes; named ones show their name, and
    // date nodes show their calendar components.
    println!("entities:");
    for entity in &elements.entities {
        println!("  {entity}");
    }
}
