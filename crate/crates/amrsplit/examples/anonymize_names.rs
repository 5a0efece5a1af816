//! Replace named entities with category placeholders before prompting, and
//! restore the originals in the model's output afterwards.
//!
//! Run with: cargo run -p amrsplit --example anonymize_names

use amrsplit::{anonymize, deanonymize, parse, serialize};

const SOURCE: &str = "(m / meet-03 \
 :ARG0 (p / person :wiki \"Marie_Curie\" :name (n / name :op1 \"Marie\" :op2 \"Curie\")) \
 :ARG1 (p2 / person :name (n2 / name :op1 \"Albert\" :op2 \"Einstein\")) \
 :location (c / city :name (n3 / name :op1 \"Brussels\")) \
 :time (d / date-entity :year 1911))";

fn main() {
    let graph = parse(SOURCE).expect("well-formed sample");
    let (anonymized, map) = anonymize(&graph);

    println!("placeholder map:");
    for entry in &map.entries {
        println!("  {:10} <- {:?}  (category {})", entry.placeholder, entry.original, entry.category);
    }

    // Name strings are gone from the graph itself; :wiki links are dropped
    // too, since they would leak the identity the placeholder hides.
    println!("\nanonymized graph:\n{}", serialize(&anonymized).unwrap());

    // Pretend a model rewrote the anonymized sentence...
    let model_output = "PERSON_0 met PERSON_1 in CITY_0 in 1911.";
    println!("\nmodel output:   {model_output}");
    println!("deanonymized:   {}", deanonymize(model_output, &map));
}
